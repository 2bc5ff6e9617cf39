#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace floodguard {

enum class VarKind { Continuous, Binary };

// Role of a variable in the protection model. Generic is used for
// hand-built instances (tests, imported MPS files).
enum class VarRole {
  Generic,
  Protect,              // theta[k]
  CrewWork,             // x[n,k,t~]
  CrewStart,            // y[n,k,t~]
  SubstationAvailable,  // h_sub[k,s]
  LineAvailable,        // h_line[l,s]
  Generation,           // p[g,s,t]
  LoadShed,             // ls[i,s,t]
  Flow,                 // flow[l,s,t]
  Angle,                // angle[i,s,t]
  DamageCost,           // beta[k]
};

std::string_view role_name(VarRole role);

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
  VarRole role = VarRole::Generic;
  // Positional indices into the case (substation, team, hour, ...); unused
  // slots are -1.
  std::array<int, 3> key{-1, -1, -1};

  bool is_binary() const { return kind == VarKind::Binary; }
};

struct VarCatalog {
  std::vector<Variable> entries;

  int add(Variable v) {
    entries.push_back(std::move(v));
    return static_cast<int>(entries.size()) - 1;
  }
  std::size_t size() const { return entries.size(); }
  const Variable& operator[](std::size_t i) const { return entries[i]; }
  Variable& operator[](std::size_t i) { return entries[i]; }

  std::size_t count(VarKind kind) const;
  std::vector<int> indices_of(VarRole role) const;
};

enum class Sense { LessEqual, Equal, GreaterEqual };

std::string_view sense_symbol(Sense s);

// Constraint families of the protection model.
enum class Family {
  Generic,
  DamageCostDefinition,
  SubstationAvailability,
  NodalBalance,
  FlowCapacityUpper,
  FlowCapacityLower,
  FlowAngleLower,
  FlowAngleUpper,
  LineAvailabilityOrigin,
  LineAvailabilityDestination,
  LineAvailabilityBoth,
  GeneratorMaximum,
  GeneratorMinimum,
  RampUp,
  RampDown,
  CrewBudget,
  ProtectionHours,
  OneSitePerTeam,
  DispatchEdgeLower,
  DispatchEdgeUpper,
  SingleDispatch,
  CrewAssignment,
};

std::string_view family_name(Family f);

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  Family family = Family::Generic;

  double activity(const std::vector<double>& x) const;
  // Positive amount by which x violates the constraint (0 when satisfied).
  double violation(const std::vector<double>& x) const;
};

struct MilpInstance {
  VarCatalog catalog;
  std::vector<Term> objective;  // minimized
  std::vector<LinearConstraint> constraints;
  double big_m = 0.0;               // largest per-line M
  std::vector<double> line_big_m;   // one per line, empty for generic models
  std::vector<std::string> warnings;

  double objective_value(const std::vector<double>& x) const;
  // Throws std::invalid_argument describing the first structural defect
  // (out-of-range index, duplicate term, bad bounds, non-finite coefficient).
  void check() const;
};

}  // namespace floodguard
