#include "floodguard/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "floodguard/lp.hpp"

namespace floodguard {

std::vector<std::string> Plan::protected_set(const CaseModel& c) const {
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < theta.size(); ++k)
    if (theta[k]) ids.push_back(c.substations[k].id);
  return ids;
}

Plan empty_plan(const CaseModel& c) {
  Plan p;
  const int K = static_cast<int>(c.substations.size());
  p.theta.assign(K, 0);
  p.work.assign(c.crew.num_teams, std::vector<std::vector<int>>(K, std::vector<int>(c.crew.prep_hours, 0)));
  return p;
}

Plan plan_from_solution(const ProtectionModel& model, const std::vector<double>& x) {
  const auto& ix = model.index;
  Plan p;
  for (int j : ix.theta) p.theta.push_back(x[j] > 0.5 ? 1 : 0);
  p.work.resize(ix.x.size());
  for (std::size_t n = 0; n < ix.x.size(); ++n) {
    p.work[n].resize(ix.x[n].size());
    for (std::size_t k = 0; k < ix.x[n].size(); ++k)
      for (int j : ix.x[n][k]) p.work[n][k].push_back(x[j] > 0.5 ? 1 : 0);
  }
  return p;
}

namespace {

void check_shape(const CaseModel& c, const Plan& plan) {
  const std::size_t K = c.substations.size();
  bool ok = plan.theta.size() == K && plan.work.size() == static_cast<std::size_t>(c.crew.num_teams);
  for (const auto& team : plan.work) {
    ok = ok && team.size() == K;
    for (const auto& row : team) ok = ok && row.size() == static_cast<std::size_t>(c.crew.prep_hours);
  }
  if (!ok) throw std::invalid_argument("plan shape does not match the case crew and substations");
}

}  // namespace

std::map<std::string, double> plan_assignment(const CaseModel& c, const ScenarioSet& scenarios,
                                              const ProtectionModel& model, const Plan& plan) {
  check_shape(c, plan);
  const auto& ix = model.index;
  const auto& cat = model.instance.catalog;
  std::map<std::string, double> a;
  const int K = static_cast<int>(c.substations.size());
  for (int k = 0; k < K; ++k) a[cat[ix.theta[k]].name] = plan.theta[k];
  for (std::size_t n = 0; n < ix.x.size(); ++n) {
    for (int k = 0; k < K; ++k) {
      int prev = 0;
      for (std::size_t t = 0; t < ix.x[n][k].size(); ++t) {
        const int w = plan.work[n][k][t];
        a[cat[ix.x[n][k][t]].name] = w;
        a[cat[ix.y[n][k][t]].name] = (w == 1 && prev == 0) ? 1 : 0;
        prev = w;
      }
    }
  }
  std::vector<int> line_from, line_to;
  for (const auto& l : c.lines) {
    line_from.push_back(c.substation_of_bus(c.bus_index(l.from_bus)));
    line_to.push_back(c.substation_of_bus(c.bus_index(l.to_bus)));
  }
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    std::vector<int> h(K);
    for (int k = 0; k < K; ++k) {
      h[k] = scenarios.scenarios[s].fails(c.substations[k].id) && !plan.theta[k] ? 0 : 1;
      a[cat[ix.h_sub[s][k]].name] = h[k];
    }
    for (std::size_t l = 0; l < c.lines.size(); ++l) a[cat[ix.h_line[s][l]].name] = h[line_from[l]] * h[line_to[l]];
  }
  return a;
}

std::vector<std::vector<std::string>> schedule_grid(const CaseModel& c, const Plan& plan) {
  std::vector<std::vector<std::string>> grid;
  for (const auto& team : plan.work) {
    std::vector<std::string> row(c.crew.prep_hours);
    for (std::size_t k = 0; k < team.size(); ++k)
      for (std::size_t t = 0; t < team[k].size(); ++t)
        if (team[k][t]) row[t] = row[t].empty() ? c.substations[k].id : row[t] + "+" + c.substations[k].id;
    grid.push_back(std::move(row));
  }
  return grid;
}

ScheduleAudit audit_schedule(const CaseModel& c, const Plan& plan) {
  check_shape(c, plan);
  ScheduleAudit audit;
  auto fail = [&](std::string msg) {
    audit.ok = false;
    audit.problems.push_back(std::move(msg));
  };
  const int N = c.crew.num_teams;
  const int H = c.crew.prep_hours;
  for (int n = 0; n < N; ++n) {
    for (int t = 0; t < H; ++t) {
      int busy = 0;
      for (const auto& site : plan.work[n]) busy += site[t];
      if (busy > 1) fail("team " + std::to_string(n + 1) + " works " + std::to_string(busy) + " sites in hour " +
                         std::to_string(t + 1));
    }
  }
  for (std::size_t k = 0; k < c.substations.size(); ++k) {
    const std::string& id = c.substations[k].id;
    int hours = 0, blocks = 0;
    std::set<int> teams;
    for (int n = 0; n < N; ++n) {
      int prev = 0;
      for (int t = 0; t < H; ++t) {
        const int w = plan.work[n][k][t];
        hours += w;
        if (w) teams.insert(n);
        if (w && !prev) ++blocks;
        prev = w;
      }
    }
    if (!plan.theta[k]) {
      if (hours > 0) fail(id + " is unprotected but receives " + std::to_string(hours) + " h");
      continue;
    }
    const int tau = protection_time(c.substations[k].mean_flood_depth, c.crew.members_per_team);
    if (hours != tau) fail(id + " receives " + std::to_string(hours) + " h, needs " + std::to_string(tau));
    if (teams.size() > 1) fail(id + " is served by " + std::to_string(teams.size()) + " teams");
    if (blocks > 1) fail(id + " work is split into " + std::to_string(blocks) + " blocks");
  }
  return audit;
}

int simulation_hours(const CaseModel& c) {
  int hours = 1;
  for (const auto& s : c.substations) hours = std::max(hours, repair_hours(s));
  return hours;
}

namespace {

// Single-hour dispatch case with fixed substation outages: no crew, one
// scenario carrying the outages.
class HourlyOpf {
 public:
  explicit HourlyOpf(const CaseModel& c) : base_(c) {
    hour_case_ = c;
    hour_case_.operating_horizon = 1;
    hour_case_.crew.num_teams = 0;
    hour_case_.crew.prep_hours = 0;
    for (auto& g : hour_case_.generators) g.initial_output.reset();
  }

  // Served MW at operating hour `t` with the given outage vector.
  double served(int t, const std::vector<int>& out) {
    const int T = base_.operating_horizon;
    const int slot = T > 0 ? t % T : 0;
    auto key = std::make_pair(slot, out);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    double demand = 0.0;
    for (std::size_t i = 0; i < base_.buses.size(); ++i) {
      const double d = base_.buses[i].demand_profile.empty() ? 0.0 : base_.buses[i].demand_profile[slot];
      hour_case_.buses[i].demand_profile = {d};
      demand += d;
    }
    ScenarioSet set;
    set.normalized = true;
    FailureScenario sc;
    sc.id = "h";
    sc.raw_probability = sc.probability = 1.0;
    for (std::size_t k = 0; k < base_.substations.size(); ++k) sc.failed[base_.substations[k].id] = out[k];
    set.scenarios.push_back(std::move(sc));
    ProtectionModel m = build(hour_case_, set);
    LpResult r = solve_lp(m.instance);
    if (r.status != LpStatus::Optimal)
      throw std::runtime_error(std::string("hourly dispatch LP ended with status ") + to_string(r.status));
    double shed = 0.0;
    for (int j : m.index.ls[0][0]) shed += r.x[j];
    const double value = std::clamp(demand - shed, 0.0, demand);
    cache_.emplace(std::move(key), value);
    return value;
  }

  double demand(int t) const {
    const int T = base_.operating_horizon;
    const int slot = T > 0 ? t % T : 0;
    double d = 0.0;
    for (const auto& b : base_.buses)
      if (!b.demand_profile.empty()) d += b.demand_profile[slot];
    return d;
  }

 private:
  const CaseModel& base_;
  CaseModel hour_case_;
  std::map<std::pair<int, std::vector<int>>, double> cache_;
};

std::vector<CurveSample> simulate(HourlyOpf& opf, const CaseModel& c, const FailureScenario& scenario,
                                  const std::vector<int>& theta) {
  if (theta.size() != c.substations.size()) throw std::invalid_argument("theta size does not match substations");
  const int hours = simulation_hours(c);
  std::vector<int> repair;
  for (const auto& s : c.substations) repair.push_back(repair_hours(s));
  std::vector<CurveSample> out;
  for (int h = 0; h < hours; ++h) {
    std::vector<int> down(c.substations.size());
    for (std::size_t k = 0; k < down.size(); ++k)
      down[k] = scenario.fails(c.substations[k].id) && !theta[k] && h < repair[k] ? 1 : 0;
    out.push_back({h, opf.demand(h), opf.served(h, down)});
  }
  return out;
}

}  // namespace

std::vector<CurveSample> recovery_simulation(const CaseModel& c, const FailureScenario& scenario,
                                             const std::vector<int>& theta) {
  HourlyOpf opf(c);
  return simulate(opf, c, scenario, theta);
}

ResilienceCurve resilience_curve(const CaseModel& c, const ScenarioSet& scenarios, const std::vector<int>& theta) {
  HourlyOpf opf(c);
  ResilienceCurve curve;
  const int hours = simulation_hours(c);
  curve.expected.resize(hours);
  for (int h = 0; h < hours; ++h) curve.expected[h].hour = h;
  for (const auto& sc : scenarios.scenarios) {
    ScenarioCurve s{sc.id, sc.probability, simulate(opf, c, sc, theta)};
    for (int h = 0; h < hours; ++h) {
      curve.expected[h].demand += sc.probability * s.samples[h].demand;
      curve.expected[h].served += sc.probability * s.samples[h].served;
    }
    curve.scenarios.push_back(std::move(s));
  }
  return curve;
}

OutageMetrics outage_metrics(const std::vector<CurveSample>& samples) {
  OutageMetrics m;
  for (const auto& s : samples) {
    const double shed = s.demand - s.served;
    m.magnitude = std::max(m.magnitude, shed);
    if (shed > 1e-6) m.time += 1.0;
  }
  return m;
}

OutageMetrics outage_metrics(const ResilienceCurve& curve) {
  OutageMetrics m;
  for (const auto& s : curve.scenarios) {
    const OutageMetrics one = outage_metrics(s.samples);
    m.magnitude += s.probability * one.magnitude;
    m.time += s.probability * one.time;
  }
  return m;
}

PlanReport evaluate_plan(const CaseModel& c, const ScenarioSet& scenarios, const Plan& plan) {
  ProtectionModel model = build(c, scenarios);
  WarmStartReport ws = warm_start_check(model.instance, plan_assignment(c, scenarios, model, plan));
  if (!ws.feasible) {
    std::ostringstream s;
    s << "plan is infeasible (" << ws.message << ")";
    for (const auto& f : ws.violated_families) s << ' ' << f;
    throw InfeasiblePlan(s.str(), ws.violated_families);
  }
  PlanReport rep;
  rep.plan = plan;
  rep.protected_set = plan.protected_set(c);
  rep.schedule = schedule_grid(c, plan);
  rep.expected_cost = ws.objective;
  rep.curve = resilience_curve(c, scenarios, plan.theta);
  const auto& ix = model.index;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& sc = scenarios.scenarios[s];
    ScenarioDetail d;
    d.id = sc.id;
    d.probability = sc.probability;
    for (std::size_t k = 0; k < c.substations.size(); ++k)
      if (sc.fails(c.substations[k].id)) d.substation_cost += ws.x[ix.beta[k]];
    for (const auto& hour : ix.ls[s])
      for (int j : hour) d.shed_energy += ws.x[j];
    d.lost_load_cost = c.costs.voll * d.shed_energy;
    d.outage = outage_metrics(rep.curve.scenarios[s].samples);
    rep.substation_cost += sc.probability * d.substation_cost;
    rep.lost_load_cost += sc.probability * d.lost_load_cost;
    rep.scenarios.push_back(std::move(d));
  }
  rep.outage = outage_metrics(rep.curve);
  return rep;
}

Plan drop_idle_protection(const CaseModel& c, const ScenarioSet& scenarios, Plan plan) {
  for (std::size_t k = 0; k < c.substations.size(); ++k) {
    if (!plan.theta[k]) continue;
    bool fails = false;
    for (const auto& sc : scenarios.scenarios) fails = fails || (sc.probability > 0.0 && sc.fails(c.substations[k].id));
    if (fails) continue;
    plan.theta[k] = 0;
    for (auto& team : plan.work) std::fill(team[k].begin(), team[k].end(), 0);
  }
  return plan;
}

PlanSolution solve_plan(const CaseModel& c, const ScenarioSet& scenarios, const MipOptions& options) {
  ProtectionModel model = build(c, scenarios);
  PlanSolution sol;
  sol.mip = solve_mip(model.instance, options);
  sol.plan = sol.mip.has_incumbent ? drop_idle_protection(c, scenarios, plan_from_solution(model, sol.mip.x))
                                   : empty_plan(c);
  return sol;
}

PlanSolution deterministic_baseline(const CaseModel& c, const MipOptions& options) {
  return solve_plan(c, all_fail_scenario(c.substations), options);
}

Delta make_delta(double a, double b) {
  Delta d;
  d.absolute = a - b;
  if (b != 0.0) d.percent = 100.0 * (a - b) / std::abs(b);
  else if (a == 0.0) d.percent = 0.0;
  return d;
}

Comparison compare_plans(const CaseModel& c, const ScenarioSet& scenarios, const Plan& a, const Plan& b) {
  Comparison cmp;
  cmp.a = evaluate_plan(c, scenarios, a);
  cmp.b = evaluate_plan(c, scenarios, b);
  cmp.expected_cost = make_delta(cmp.a.expected_cost, cmp.b.expected_cost);
  cmp.substation_cost = make_delta(cmp.a.substation_cost, cmp.b.substation_cost);
  cmp.lost_load_cost = make_delta(cmp.a.lost_load_cost, cmp.b.lost_load_cost);
  cmp.outage_magnitude = make_delta(cmp.a.outage.magnitude, cmp.b.outage.magnitude);
  cmp.outage_time = make_delta(cmp.a.outage.time, cmp.b.outage.time);
  return cmp;
}

CaseModel scale_parameter(const CaseModel& c, const std::string& parameter, double factor) {
  CaseModel out = c;
  if (parameter == "voll") {
    out.costs.voll *= factor;
  } else if (parameter == "tiger_dam_cost") {
    for (auto& s : out.substations) s.tiger_dam_cost *= factor;
  } else if (parameter == "operating_horizon") {
    out = with_horizon(c, std::max(1, static_cast<int>(std::lround(c.operating_horizon * factor))));
  } else if (parameter == "line_capacity") {
    for (auto& l : out.lines) l.capacity *= factor;
  } else if (parameter == "susceptance") {
    for (auto& l : out.lines) l.susceptance *= factor;
  } else if (parameter == "angle_bound") {
    out.costs.big_m_angle_bound *= factor;
  } else {
    throw std::invalid_argument("unknown parameter " + parameter);
  }
  return out;
}

SensitivityNote protection_sensitivity(const CaseModel& c, const ScenarioSet& scenarios,
                                       const std::vector<double>& factors, const MipOptions& options,
                                       unsigned threads) {
  static const std::vector<std::string> params{"voll",         "tiger_dam_cost", "operating_horizon",
                                               "line_capacity", "susceptance",    "angle_bound"};
  MipOptions opt = options;
  opt.log = nullptr;
  opt.on_node = nullptr;

  struct Job {
    std::string parameter;
    double factor;
  };
  std::vector<Job> jobs{{"", 1.0}};
  for (const auto& p : params)
    for (double f : factors) jobs.push_back({p, f});
  std::vector<PlanSolution> results(jobs.size());
  std::vector<std::string> errors(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const CaseModel cc = jobs[i].parameter.empty() ? c : scale_parameter(c, jobs[i].parameter, jobs[i].factor);
        results[i] = solve_plan(cc, scenarios, opt);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (!errors[0].empty()) throw std::runtime_error("base solve failed: " + errors[0]);
  SensitivityNote note;
  note.base_set = results[0].plan.protected_set(c);
  std::set<std::string> changing;
  for (std::size_t i = 1; i < jobs.size(); ++i) {
    SensitivityEntry e;
    e.parameter = jobs[i].parameter;
    e.factor = jobs[i].factor;
    if (!errors[i].empty()) {
      e.status = "error: " + errors[i];
    } else {
      e.status = to_string(results[i].mip.status);
      if (results[i].mip.has_incumbent) e.protected_set = results[i].plan.protected_set(c);
      e.changed = results[i].mip.status == MipStatus::Optimal && e.protected_set != note.base_set;
    }
    if (e.changed) changing.insert(e.parameter);
    note.entries.push_back(std::move(e));
  }
  note.changing_parameters.assign(changing.begin(), changing.end());
  return note;
}

}  // namespace floodguard
