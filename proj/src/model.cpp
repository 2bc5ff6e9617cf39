#include "floodguard/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace floodguard {

std::string_view role_name(VarRole role) {
  switch (role) {
    case VarRole::Generic: return "generic";
    case VarRole::Protect: return "theta";
    case VarRole::CrewWork: return "x";
    case VarRole::CrewStart: return "y";
    case VarRole::SubstationAvailable: return "h_sub";
    case VarRole::LineAvailable: return "h_line";
    case VarRole::Generation: return "p";
    case VarRole::LoadShed: return "ls";
    case VarRole::Flow: return "flow";
    case VarRole::Angle: return "angle";
    case VarRole::DamageCost: return "beta";
  }
  return "unknown";
}

std::string_view sense_symbol(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::Equal: return "=";
    case Sense::GreaterEqual: return ">=";
  }
  return "?";
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Generic: return "generic";
    case Family::DamageCostDefinition: return "damage_cost_definition";
    case Family::SubstationAvailability: return "substation_availability";
    case Family::NodalBalance: return "nodal_balance";
    case Family::FlowCapacityUpper: return "flow_capacity_upper";
    case Family::FlowCapacityLower: return "flow_capacity_lower";
    case Family::FlowAngleLower: return "flow_angle_lower";
    case Family::FlowAngleUpper: return "flow_angle_upper";
    case Family::LineAvailabilityOrigin: return "line_availability_origin";
    case Family::LineAvailabilityDestination: return "line_availability_destination";
    case Family::LineAvailabilityBoth: return "line_availability_both";
    case Family::GeneratorMaximum: return "generator_maximum";
    case Family::GeneratorMinimum: return "generator_minimum";
    case Family::RampUp: return "ramp_up";
    case Family::RampDown: return "ramp_down";
    case Family::CrewBudget: return "crew_budget";
    case Family::ProtectionHours: return "protection_hours";
    case Family::OneSitePerTeam: return "one_site_per_team";
    case Family::DispatchEdgeLower: return "dispatch_edge_lower";
    case Family::DispatchEdgeUpper: return "dispatch_edge_upper";
    case Family::SingleDispatch: return "single_dispatch";
    case Family::CrewAssignment: return "crew_assignment";
  }
  return "unknown";
}

std::size_t VarCatalog::count(VarKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [kind](const Variable& v) { return v.kind == kind; }));
}

std::vector<int> VarCatalog::indices_of(VarRole role) const {
  std::vector<int> out;
  for (std::size_t j = 0; j < entries.size(); ++j)
    if (entries[j].role == role) out.push_back(static_cast<int>(j));
  return out;
}

double LinearConstraint::activity(const std::vector<double>& x) const {
  double sum = 0.0;
  for (const auto& t : terms) sum += t.coef * x[t.var];
  return sum;
}

double LinearConstraint::violation(const std::vector<double>& x) const {
  const double a = activity(x);
  switch (sense) {
    case Sense::LessEqual: return std::max(0.0, a - rhs);
    case Sense::GreaterEqual: return std::max(0.0, rhs - a);
    case Sense::Equal: return std::abs(a - rhs);
  }
  return 0.0;
}

double MilpInstance::objective_value(const std::vector<double>& x) const {
  double sum = 0.0;
  for (const auto& t : objective) sum += t.coef * x[t.var];
  return sum;
}

void MilpInstance::check() const {
  const int n = static_cast<int>(catalog.size());
  std::unordered_set<std::string> names;
  for (const auto& v : catalog.entries) {
    if (!names.insert(v.name).second)
      throw std::invalid_argument("duplicate variable name " + v.name);
    if (!(v.lower <= v.upper))
      throw std::invalid_argument("variable " + v.name + " has lower > upper");
    if (v.is_binary() && (v.lower < 0.0 || v.upper > 1.0))
      throw std::invalid_argument("binary variable " + v.name + " has bounds outside [0,1]");
  }
  auto check_terms = [n](const std::vector<Term>& terms, const std::string& where) {
    std::unordered_set<int> seen;
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n)
        throw std::invalid_argument(where + ": variable index out of range");
      if (!std::isfinite(t.coef))
        throw std::invalid_argument(where + ": non-finite coefficient");
      if (!seen.insert(t.var).second)
        throw std::invalid_argument(where + ": duplicate variable index");
    }
  };
  check_terms(objective, "objective");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    check_terms(constraints[i].terms, "constraint " + std::to_string(i));
    if (!std::isfinite(constraints[i].rhs))
      throw std::invalid_argument("constraint " + std::to_string(i) + ": non-finite rhs");
  }
}

}  // namespace floodguard
