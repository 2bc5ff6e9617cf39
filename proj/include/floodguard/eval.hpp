#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "floodguard/domain.hpp"
#include "floodguard/milp.hpp"
#include "floodguard/mip.hpp"
#include "floodguard/scenario.hpp"

namespace floodguard {

// Protection decision plus crew schedule. work[n][k][t] = 1 when team n
// works on substation k during protection hour t.
struct Plan {
  std::vector<int> theta;
  std::vector<std::vector<std::vector<int>>> work;

  std::vector<std::string> protected_set(const CaseModel& c) const;
};

Plan empty_plan(const CaseModel& c);

// Reads theta and x from a solution vector, rounding to {0,1}.
Plan plan_from_solution(const ProtectionModel& model, const std::vector<double>& x);

// Binary assignment by variable name. Crew starts are the rising edges of the
// work schedule; availability indicators follow from theta and the scenario.
std::map<std::string, double> plan_assignment(const CaseModel& c, const ScenarioSet& scenarios,
                                              const ProtectionModel& model, const Plan& plan);

// Team x hour grid of substation ids ("" when idle).
std::vector<std::vector<std::string>> schedule_grid(const CaseModel& c, const Plan& plan);

struct ScheduleAudit {
  bool ok = true;
  std::vector<std::string> problems;
};

// Checks that each protected substation gets exactly tau_k contiguous hours
// from one team, unprotected ones get none, and no team works two sites at
// once.
ScheduleAudit audit_schedule(const CaseModel& c, const Plan& plan);

struct CurveSample {
  int hour = 0;
  double demand = 0.0;  // MW
  double served = 0.0;  // MW
};

struct ScenarioCurve {
  std::string scenario_id;
  double probability = 0.0;
  std::vector<CurveSample> samples;
};

struct ResilienceCurve {
  std::vector<ScenarioCurve> scenarios;
  std::vector<CurveSample> expected;
};

// Hours simulated after flood onset: the longest ceiled repair time, at least 1.
int simulation_hours(const CaseModel& c);

// Served load per hour after flood onset. A substation is out while it failed,
// is unprotected and its repair is unfinished; each hour is a single-hour DC
// OPF minimizing lost load. Demand at hour h uses profile[h mod T_op].
std::vector<CurveSample> recovery_simulation(const CaseModel& c, const FailureScenario& scenario,
                                             const std::vector<int>& theta);

ResilienceCurve resilience_curve(const CaseModel& c, const ScenarioSet& scenarios, const std::vector<int>& theta);

struct OutageMetrics {
  double magnitude = 0.0;  // peak MW shed
  double time = 0.0;       // hours with shed above 1e-6 MW
};

OutageMetrics outage_metrics(const std::vector<CurveSample>& samples);
// Probability-weighted metrics over the scenarios of the curve.
OutageMetrics outage_metrics(const ResilienceCurve& curve);

struct ScenarioDetail {
  std::string id;
  double probability = 0.0;
  double substation_cost = 0.0;  // sum of beta_k over failed substations
  double lost_load_cost = 0.0;   // VOLL * shed energy over the operating horizon
  double shed_energy = 0.0;      // MWh
  OutageMetrics outage;
};

struct PlanReport {
  Plan plan;
  std::vector<std::string> protected_set;
  std::vector<std::vector<std::string>> schedule;
  double expected_cost = 0.0;
  double substation_cost = 0.0;
  double lost_load_cost = 0.0;
  OutageMetrics outage;
  ResilienceCurve curve;
  std::vector<ScenarioDetail> scenarios;
};

// Thrown when a plan is not feasible for the model; lists the violated
// constraint families.
class InfeasiblePlan : public std::runtime_error {
 public:
  InfeasiblePlan(const std::string& what, std::vector<std::string> fams)
      : std::runtime_error(what), families(std::move(fams)) {}
  std::vector<std::string> families;
};

// Scores a plan on a scenario set: expected cost of the model with the plan
// fixed, plus the resilience curve and outage metrics.
PlanReport evaluate_plan(const CaseModel& c, const ScenarioSet& scenarios, const Plan& plan);

// Unprotects substations that fail in no scenario of positive probability.
// Their protection carries no cost term, so the objective is unchanged and
// the solver's choice between the two is arbitrary.
Plan drop_idle_protection(const CaseModel& c, const ScenarioSet& scenarios, Plan plan);

struct PlanSolution {
  MipResult mip;
  Plan plan;
};

// Builds and solves the stochastic model. The plan is empty when no
// incumbent was found, and idle protection is dropped.
PlanSolution solve_plan(const CaseModel& c, const ScenarioSet& scenarios, const MipOptions& options = {});

// The same model with a single scenario in which every substation fails.
PlanSolution deterministic_baseline(const CaseModel& c, const MipOptions& options = {});

struct Delta {
  double absolute = 0.0;  // a - b
  std::optional<double> percent;  // 100 (a - b) / |b|; empty when b = 0 and a != 0
};

Delta make_delta(double a, double b);

struct Comparison {
  PlanReport a;
  PlanReport b;
  Delta expected_cost;
  Delta substation_cost;
  Delta lost_load_cost;
  Delta outage_magnitude;
  Delta outage_time;
};

Comparison compare_plans(const CaseModel& c, const ScenarioSet& scenarios, const Plan& a, const Plan& b);

struct SensitivityEntry {
  std::string parameter;
  double factor = 1.0;
  std::string status;  // MIP status of the perturbed solve
  std::vector<std::string> protected_set;
  bool changed = false;
};

struct SensitivityNote {
  std::vector<std::string> base_set;
  std::vector<SensitivityEntry> entries;
  std::vector<std::string> changing_parameters;  // sorted, unique
};

// Re-solves the model with each invented default (VOLL, tiger dam cost,
// operating horizon, line capacity, line susceptance, angle bound) scaled by
// each factor and records which perturbations change the protected set.
// Solves run on up to `threads` worker threads; results keep input order.
SensitivityNote protection_sensitivity(const CaseModel& c, const ScenarioSet& scenarios,
                                       const std::vector<double>& factors = {0.5, 1.5},
                                       const MipOptions& options = {}, unsigned threads = 0);

// Scales one named default of a case. Known names: voll, tiger_dam_cost,
// operating_horizon, line_capacity, susceptance, angle_bound.
CaseModel scale_parameter(const CaseModel& c, const std::string& parameter, double factor);

}  // namespace floodguard
