#include "floodguard/milp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace floodguard {

double big_m_for_line(const Line& line, double angle_bound, double base_mva) {
  if (!(angle_bound > 0.0)) throw std::invalid_argument("angle bound must be positive");
  return base_mva * line.susceptance * 2.0 * angle_bound;
}

std::pair<LinearConstraint, LinearConstraint> crew_edge_constraints(int x_t, std::optional<int> x_prev,
                                                                    int y_t, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("edge epsilon must lie in (0, 0.5)");
  LinearConstraint lower;
  lower.family = Family::DispatchEdgeLower;
  lower.sense = Sense::LessEqual;
  lower.terms.push_back({x_t, 0.5});
  if (x_prev) lower.terms.push_back({*x_prev, -0.5});
  lower.terms.push_back({y_t, -1.0});
  lower.rhs = epsilon;

  LinearConstraint upper;
  upper.family = Family::DispatchEdgeUpper;
  upper.sense = Sense::LessEqual;
  upper.terms.push_back({y_t, 1.0});
  upper.terms.push_back({x_t, -0.5});
  if (x_prev) upper.terms.push_back({*x_prev, 0.5});
  upper.rhs = 0.5 + epsilon;
  return {lower, upper};
}

namespace {

struct Builder {
  MilpInstance inst;

  int binary(std::string name, VarRole role, std::array<int, 3> key) {
    return inst.catalog.add({std::move(name), VarKind::Binary, 0.0, 1.0, role, key});
  }
  int continuous(std::string name, double lo, double hi, VarRole role, std::array<int, 3> key) {
    return inst.catalog.add({std::move(name), VarKind::Continuous, lo, hi, role, key});
  }
  void row(std::vector<Term> terms, Sense sense, double rhs, Family family) {
    inst.constraints.push_back({std::move(terms), sense, rhs, family});
  }
};

std::string label(const char* head, std::initializer_list<std::string> parts) {
  std::ostringstream s;
  s << head << '[';
  bool first = true;
  for (const auto& p : parts) {
    if (!first) s << ',';
    s << p;
    first = false;
  }
  s << ']';
  return s.str();
}

}  // namespace

ProtectionModel build(const CaseModel& c, const ScenarioSet& scenarios, const BuildOptions& options) {
  if (!scenarios.normalized) throw std::invalid_argument("scenario set must be normalized before building");
  if (scenarios.scenarios.empty()) throw std::invalid_argument("scenario set is empty");
  for (const auto& sc : scenarios.scenarios)
    for (const auto& sub : c.substations)
      if (!sc.failed.count(sub.id))
        throw std::invalid_argument("scenario " + sc.id + " has no indicator for substation " + sub.id);

  const int K = static_cast<int>(c.substations.size());
  const int N = c.crew.num_teams;
  const int H = c.crew.prep_hours;
  const int S = static_cast<int>(scenarios.size());
  const int T = c.operating_horizon;
  const int I = static_cast<int>(c.buses.size());
  const int L = static_cast<int>(c.lines.size());
  const int G = static_cast<int>(c.generators.size());
  const double angle = c.costs.big_m_angle_bound;

  ProtectionModel model;
  ModelIndex& ix = model.index;
  Builder b;

  model.protection_hours.resize(K);
  for (int k = 0; k < K; ++k) {
    model.protection_hours[k] = protection_time(c.substations[k].mean_flood_depth, c.crew.members_per_team);
    if (model.protection_hours[k] > H)
      b.inst.warnings.push_back("substation " + c.substations[k].id + " needs " +
                                std::to_string(model.protection_hours[k]) + " h of protection but only " +
                                std::to_string(H) + " h are available; it can only be left unprotected");
  }

  // Bus-level lookups.
  std::vector<int> line_from(L), line_to(L);
  for (int l = 0; l < L; ++l) {
    line_from[l] = c.bus_index(c.lines[l].from_bus);
    line_to[l] = c.bus_index(c.lines[l].to_bus);
  }
  std::vector<int> gen_bus(G);
  for (int g = 0; g < G; ++g) gen_bus[g] = c.bus_index(c.generators[g].bus_id);
  std::vector<int> bus_sub(I);
  for (int i = 0; i < I; ++i) bus_sub[i] = c.substation_of_bus(i);
  ix.slack_bus = 0;
  for (int i = 0; i < I; ++i) {
    if (std::find(gen_bus.begin(), gen_bus.end(), i) != gen_bus.end()) {
      ix.slack_bus = i;
      break;
    }
  }

  // Variables.
  ix.theta.resize(K);
  for (int k = 0; k < K; ++k)
    ix.theta[k] = b.binary(label("theta", {c.substations[k].id}), VarRole::Protect, {k, -1, -1});
  ix.x.assign(N, std::vector<std::vector<int>>(K, std::vector<int>(H)));
  ix.y = ix.x;
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < H; ++t)
        ix.x[n][k][t] = b.binary(label("x", {std::to_string(n + 1), c.substations[k].id, std::to_string(t + 1)}),
                                 VarRole::CrewWork, {n, k, t});
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < H; ++t)
        ix.y[n][k][t] = b.binary(label("y", {std::to_string(n + 1), c.substations[k].id, std::to_string(t + 1)}),
                                 VarRole::CrewStart, {n, k, t});
  ix.beta.resize(K);
  for (int k = 0; k < K; ++k) {
    const auto cost = imposed_cost_coefficients(c.substations[k]);
    ix.beta[k] = b.continuous(label("beta", {c.substations[k].id}), std::min(cost.protect_cost, cost.fail_cost),
                              std::max(cost.protect_cost, cost.fail_cost), VarRole::DamageCost, {k, -1, -1});
  }
  ix.h_sub.assign(S, std::vector<int>(K));
  ix.h_line.assign(S, std::vector<int>(L));
  ix.p.assign(S, std::vector<std::vector<int>>(T, std::vector<int>(G)));
  ix.ls.assign(S, std::vector<std::vector<int>>(T, std::vector<int>(I)));
  ix.flow.assign(S, std::vector<std::vector<int>>(T, std::vector<int>(L)));
  ix.angle.assign(S, std::vector<std::vector<int>>(T, std::vector<int>(I)));
  for (int s = 0; s < S; ++s) {
    const std::string& sid = scenarios.scenarios[s].id;
    for (int k = 0; k < K; ++k)
      ix.h_sub[s][k] = b.binary(label("h_sub", {c.substations[k].id, sid}), VarRole::SubstationAvailable, {k, s, -1});
    for (int l = 0; l < L; ++l)
      ix.h_line[s][l] = b.binary(label("h_line", {c.lines[l].id, sid}), VarRole::LineAvailable, {l, s, -1});
    for (int t = 0; t < T; ++t) {
      const std::string hour = std::to_string(t + 1);
      for (int g = 0; g < G; ++g)
        ix.p[s][t][g] = b.continuous(label("p", {c.generators[g].id, sid, hour}), 0.0, c.generators[g].p_max,
                                     VarRole::Generation, {g, s, t});
      for (int i = 0; i < I; ++i)
        ix.ls[s][t][i] = b.continuous(label("ls", {c.buses[i].id, sid, hour}), 0.0, c.buses[i].demand_profile[t],
                                      VarRole::LoadShed, {i, s, t});
      for (int l = 0; l < L; ++l)
        ix.flow[s][t][l] = b.continuous(label("flow", {c.lines[l].id, sid, hour}), -c.lines[l].capacity,
                                        c.lines[l].capacity, VarRole::Flow, {l, s, t});
      for (int i = 0; i < I; ++i) {
        const double bound = i == ix.slack_bus ? 0.0 : angle;
        ix.angle[s][t][i] = b.continuous(label("angle", {c.buses[i].id, sid, hour}), -bound, bound,
                                         VarRole::Angle, {i, s, t});
      }
    }
  }

  // Objective: expected imposed substation cost plus expected lost-load cost.
  for (int k = 0; k < K; ++k) {
    double weight = 0.0;
    for (const auto& sc : scenarios.scenarios)
      if (sc.fails(c.substations[k].id)) weight += sc.probability;
    if (weight != 0.0) b.inst.objective.push_back({ix.beta[k], weight});
  }
  for (int s = 0; s < S; ++s) {
    const double w = scenarios.scenarios[s].probability * c.costs.voll;
    if (w == 0.0) continue;
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < I; ++i) b.inst.objective.push_back({ix.ls[s][t][i], w});
  }

  // beta_k = DC_k + (C_k - DC_k) theta_k
  for (int k = 0; k < K; ++k) {
    const auto cost = imposed_cost_coefficients(c.substations[k]);
    std::vector<Term> terms{{ix.beta[k], 1.0}};
    if (cost.protect_cost != cost.fail_cost) terms.push_back({ix.theta[k], -(cost.protect_cost - cost.fail_cost)});
    b.row(std::move(terms), Sense::Equal, cost.fail_cost, Family::DamageCostDefinition);
  }

  // Crew scheduling.
  {
    std::vector<Term> budget;
    for (int n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k)
        for (int t = 0; t < H; ++t) budget.push_back({ix.x[n][k][t], 1.0});
    b.row(std::move(budget), Sense::LessEqual, static_cast<double>(N) * H, Family::CrewBudget);
  }
  for (int k = 0; k < K; ++k) {
    std::vector<Term> terms;
    for (int n = 0; n < N; ++n)
      for (int t = 0; t < H; ++t) terms.push_back({ix.x[n][k][t], 1.0});
    terms.push_back({ix.theta[k], -static_cast<double>(model.protection_hours[k])});
    b.row(std::move(terms), Sense::Equal, 0.0, Family::ProtectionHours);
  }
  for (int n = 0; n < N; ++n) {
    for (int t = 0; t < H; ++t) {
      std::vector<Term> terms;
      for (int k = 0; k < K; ++k) terms.push_back({ix.x[n][k][t], 1.0});
      b.row(std::move(terms), Sense::LessEqual, 1.0, Family::OneSitePerTeam);
    }
  }
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < K; ++k) {
      for (int t = 0; t < H; ++t) {
        std::optional<int> prev;
        if (t > 0) prev = ix.x[n][k][t - 1];
        auto [lo, hi] = crew_edge_constraints(ix.x[n][k][t], prev, ix.y[n][k][t], c.crew.edge_epsilon);
        b.inst.constraints.push_back(std::move(lo));
        b.inst.constraints.push_back(std::move(hi));
      }
    }
  }
  for (int k = 0; k < K; ++k) {
    std::vector<Term> terms;
    for (int n = 0; n < N; ++n)
      for (int t = 0; t < H; ++t) terms.push_back({ix.y[n][k][t], 1.0});
    b.row(std::move(terms), Sense::LessEqual, 1.0, Family::SingleDispatch);
  }
  if (options.crew_assignment_rows) {
    for (int n = 0; n < N; ++n) {
      for (int k = 0; k < K; ++k) {
        std::vector<Term> terms;
        for (int t = 0; t < H; ++t) terms.push_back({ix.x[n][k][t], 1.0});
        for (int t = 0; t < H; ++t) terms.push_back({ix.y[n][k][t], -static_cast<double>(model.protection_hours[k])});
        b.row(std::move(terms), Sense::Equal, 0.0, Family::CrewAssignment);
      }
    }
  }

  // Per-scenario network.
  b.inst.line_big_m.resize(L);
  for (int l = 0; l < L; ++l) {
    b.inst.line_big_m[l] = big_m_for_line(c.lines[l], angle, c.base_mva);
    b.inst.big_m = std::max(b.inst.big_m, b.inst.line_big_m[l]);
  }
  for (int s = 0; s < S; ++s) {
    const auto& sc = scenarios.scenarios[s];
    for (int k = 0; k < K; ++k) {
      const double f = sc.fails(c.substations[k].id) ? 1.0 : 0.0;
      std::vector<Term> terms{{ix.h_sub[s][k], 1.0}};
      if (f != 0.0) terms.push_back({ix.theta[k], -f});
      b.row(std::move(terms), Sense::Equal, 1.0 - f, Family::SubstationAvailability);
    }
    for (int l = 0; l < L; ++l) {
      const int ho = ix.h_sub[s][bus_sub[line_from[l]]];
      const int hd = ix.h_sub[s][bus_sub[line_to[l]]];
      const int hl = ix.h_line[s][l];
      b.row({{hl, 1.0}, {ho, -1.0}}, Sense::LessEqual, 0.0, Family::LineAvailabilityOrigin);
      b.row({{hl, 1.0}, {hd, -1.0}}, Sense::LessEqual, 0.0, Family::LineAvailabilityDestination);
      b.row({{hl, 1.0}, {ho, -1.0}, {hd, -1.0}}, Sense::GreaterEqual, -1.0, Family::LineAvailabilityBoth);
    }
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < I; ++i) {
        std::vector<Term> terms;
        for (int g = 0; g < G; ++g)
          if (gen_bus[g] == i) terms.push_back({ix.p[s][t][g], 1.0});
        terms.push_back({ix.ls[s][t][i], 1.0});
        for (int l = 0; l < L; ++l) {
          if (line_from[l] == i) terms.push_back({ix.flow[s][t][l], -1.0});
          if (line_to[l] == i) terms.push_back({ix.flow[s][t][l], 1.0});
        }
        b.row(std::move(terms), Sense::Equal, c.buses[i].demand_profile[t], Family::NodalBalance);
      }
      for (int l = 0; l < L; ++l) {
        const int f = ix.flow[s][t][l];
        const int hl = ix.h_line[s][l];
        const int d_o = ix.angle[s][t][line_from[l]];
        const int d_d = ix.angle[s][t][line_to[l]];
        const double cap = c.lines[l].capacity;
        const double coef = c.base_mva * c.lines[l].susceptance;
        const double M = b.inst.line_big_m[l];
        b.row({{f, 1.0}, {hl, -cap}}, Sense::LessEqual, 0.0, Family::FlowCapacityUpper);
        b.row({{f, -1.0}, {hl, -cap}}, Sense::LessEqual, 0.0, Family::FlowCapacityLower);
        b.row({{f, 1.0}, {d_o, -coef}, {d_d, coef}, {hl, -M}}, Sense::GreaterEqual, -M, Family::FlowAngleLower);
        b.row({{f, 1.0}, {d_o, -coef}, {d_d, coef}, {hl, M}}, Sense::LessEqual, M, Family::FlowAngleUpper);
      }
      for (int g = 0; g < G; ++g) {
        const auto& gen = c.generators[g];
        const int p = ix.p[s][t][g];
        const int h = ix.h_sub[s][bus_sub[gen_bus[g]]];
        b.row({{p, 1.0}, {h, -gen.p_max}}, Sense::LessEqual, 0.0, Family::GeneratorMaximum);
        if (c.enforce_generator_minimum && gen.p_min > 0.0)
          b.row({{p, 1.0}, {h, -gen.p_min}}, Sense::GreaterEqual, 0.0, Family::GeneratorMinimum);
        if (t > 0) {
          const int prev = ix.p[s][t - 1][g];
          b.row({{p, 1.0}, {prev, -1.0}}, Sense::LessEqual, gen.ramp_up, Family::RampUp);
          b.row({{prev, 1.0}, {p, -1.0}}, Sense::LessEqual, gen.ramp_down, Family::RampDown);
        } else if (gen.initial_output) {
          b.row({{p, 1.0}}, Sense::LessEqual, gen.ramp_up + *gen.initial_output, Family::RampUp);
          b.row({{p, -1.0}}, Sense::LessEqual, gen.ramp_down - *gen.initial_output, Family::RampDown);
        }
      }
    }
  }

  model.instance = std::move(b.inst);
  return model;
}

}  // namespace floodguard
