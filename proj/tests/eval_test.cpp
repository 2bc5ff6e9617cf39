#include <gtest/gtest.h>

#include "case_fixture.hpp"
#include "floodguard/eval.hpp"
#include "floodguard/io.hpp"

namespace floodguard {
namespace {

using testing::sixbus;

ScenarioSet reference_scenarios() { return nested_severity_reduction(sixbus().substations, {1.2, 1.1, 0.8, 0.5}); }

std::vector<int> theta_of(const std::vector<std::string>& ids) {
  std::vector<int> theta(sixbus().substations.size(), 0);
  for (const auto& id : ids) theta[sixbus().substation_index(id)] = 1;
  return theta;
}

FailureScenario failing(const std::vector<std::string>& ids) {
  FailureScenario s;
  s.id = "T";
  s.probability = 1.0;
  for (const auto& sub : sixbus().substations) s.failed[sub.id] = 0;
  for (const auto& id : ids) s.failed[id] = 1;
  return s;
}

TEST(Simulation, HoursCoverLongestRepair) { EXPECT_EQ(simulation_hours(sixbus()), 25); }

TEST(Simulation, NoFailureServesDemand) {
  const auto samples = recovery_simulation(sixbus(), failing({}), theta_of({}));
  ASSERT_EQ(samples.size(), 25u);
  for (const auto& s : samples) {
    EXPECT_DOUBLE_EQ(s.demand, 135.0);
    EXPECT_NEAR(s.served, s.demand, 1e-6);
  }
}

TEST(Simulation, AllFailedServesNothingUntilFirstRepair) {
  const auto samples = recovery_simulation(sixbus(), failing({"k1", "k2", "k3", "k4", "k5", "k6"}), theta_of({}));
  // k1 (12.3 h) is the first back; every load bus is still down then.
  for (int h = 0; h < 13; ++h) EXPECT_NEAR(samples[h].served, 0.0, 1e-6) << h;
  // At hour 24 only k6 (25 h) is out: 135 - 50 MW.
  EXPECT_NEAR(samples[24].served, 85.0, 1e-6);
}

TEST(Simulation, ProtectedSetLeavesOnlyK4Out) {
  // Bus 4 has no load; with k4 out G1 alone carries 135 MW over L1 (1-2) and
  // L4 (2-5), both rated 150 MW, so nothing is shed.
  const auto samples = recovery_simulation(sixbus(), failing({"k4", "k6"}), theta_of({"k2", "k3", "k5", "k6"}));
  for (const auto& s : samples) EXPECT_NEAR(s.served, 135.0, 1e-6);
}

TEST(Simulation, BottleneckShedsUntilRepair) {
  // L1 derated to 100 MW: with bus 4 out, all 135 MW for buses 3, 5, 6 must
  // cross L1, so 35 MW is shed until k4 returns at ceil(23.1) = 24 h.
  CaseModel c = sixbus();
  c.lines[0].capacity = 100.0;
  const auto samples = recovery_simulation(c, failing({"k4", "k6"}), theta_of({"k2", "k3", "k5", "k6"}));
  for (int h = 0; h < 24; ++h) EXPECT_NEAR(samples[h].served, 100.0, 1e-6) << h;
  EXPECT_NEAR(samples[24].served, 135.0, 1e-6);
  const auto m = outage_metrics(samples);
  EXPECT_NEAR(m.magnitude, 35.0, 1e-6);
  EXPECT_DOUBLE_EQ(m.time, 24.0);
}

TEST(OutageMetrics, Definitions) {
  std::vector<CurveSample> none(24, {0, 50.0, 50.0});
  const auto z = outage_metrics(none);
  EXPECT_DOUBLE_EQ(z.magnitude, 0.0);
  EXPECT_DOUBLE_EQ(z.time, 0.0);
  std::vector<CurveSample> shed(24, {0, 50.0, 50.0});
  for (int h = 3; h < 8; ++h) shed[h].served = 40.0;
  const auto m = outage_metrics(shed);
  EXPECT_DOUBLE_EQ(m.magnitude, 10.0);
  EXPECT_DOUBLE_EQ(m.time, 5.0);
}

TEST(OutageMetrics, ExpectedIsProbabilityWeighted) {
  ResilienceCurve curve;
  curve.scenarios.push_back({"a", 0.25, std::vector<CurveSample>(4, {0, 10.0, 2.0})});
  curve.scenarios.push_back({"b", 0.75, std::vector<CurveSample>(4, {0, 10.0, 10.0})});
  const auto m = outage_metrics(curve);
  EXPECT_DOUBLE_EQ(m.magnitude, 0.25 * 8.0);
  EXPECT_DOUBLE_EQ(m.time, 0.25 * 4.0);
}

TEST(MakeDelta, Cases) {
  const auto d = make_delta(90.0, 100.0);
  EXPECT_DOUBLE_EQ(d.absolute, -10.0);
  EXPECT_DOUBLE_EQ(*d.percent, -10.0);
  EXPECT_FALSE(make_delta(5.0, 0.0).percent.has_value());
  EXPECT_DOUBLE_EQ(*make_delta(0.0, 0.0).percent, 0.0);
}

class BundledPlans : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    stochastic_ = new PlanSolution(solve_plan(sixbus(), reference_scenarios()));
    deterministic_ = new PlanSolution(deterministic_baseline(sixbus()));
  }
  static void TearDownTestSuite() {
    delete stochastic_;
    delete deterministic_;
  }
  static PlanSolution* stochastic_;
  static PlanSolution* deterministic_;
};

PlanSolution* BundledPlans::stochastic_ = nullptr;
PlanSolution* BundledPlans::deterministic_ = nullptr;

TEST_F(BundledPlans, ReportMatchesSolverObjective) {
  const auto r = evaluate_plan(sixbus(), reference_scenarios(), stochastic_->plan);
  EXPECT_NEAR(r.expected_cost, stochastic_->mip.objective, 1e-6 * r.expected_cost);
  EXPECT_NEAR(r.expected_cost, r.substation_cost + r.lost_load_cost, 1e-6 * r.expected_cost);
  EXPECT_EQ(r.protected_set, (std::vector<std::string>{"k2", "k3", "k5", "k6"}));
  ASSERT_EQ(r.scenarios.size(), 4u);
  ASSERT_EQ(r.curve.expected.size(), 25u);
}

TEST_F(BundledPlans, SelfComparisonIsZero) {
  const auto cmp = compare_plans(sixbus(), reference_scenarios(), stochastic_->plan, stochastic_->plan);
  for (const Delta* d : {&cmp.expected_cost, &cmp.substation_cost, &cmp.lost_load_cost, &cmp.outage_magnitude,
                         &cmp.outage_time}) {
    EXPECT_DOUBLE_EQ(d->absolute, 0.0);
    EXPECT_DOUBLE_EQ(d->percent.value_or(0.0), 0.0);
  }
}

TEST_F(BundledPlans, StochasticDominates) {
  const auto vs_det = compare_plans(sixbus(), reference_scenarios(), stochastic_->plan, deterministic_->plan);
  EXPECT_LE(vs_det.a.expected_cost, vs_det.b.expected_cost);
  EXPECT_LT(vs_det.a.outage.magnitude, vs_det.b.outage.magnitude);
  EXPECT_LE(vs_det.a.outage.time, vs_det.b.outage.time);
  const auto vs_empty = compare_plans(sixbus(), reference_scenarios(), stochastic_->plan, empty_plan(sixbus()));
  EXPECT_LE(vs_empty.a.expected_cost, vs_empty.b.expected_cost);
}

TEST_F(BundledPlans, DeterministicPlanIsAudited) {
  EXPECT_TRUE(audit_schedule(sixbus(), deterministic_->plan).ok);
  EXPECT_EQ(deterministic_->mip.status, MipStatus::Optimal);
}

TEST(EvaluatePlan, InfeasiblePlanNamesFamily) {
  Plan plan = empty_plan(sixbus());
  plan.theta[1] = 1;  // k2 protected with no crew hours
  try {
    evaluate_plan(sixbus(), reference_scenarios(), plan);
    FAIL() << "expected InfeasiblePlan";
  } catch (const InfeasiblePlan& e) {
    EXPECT_NE(std::find(e.families.begin(), e.families.end(), "protection_hours"), e.families.end());
  }
}

TEST(AuditSchedule, DetectsViolations) {
  const CaseModel& c = sixbus();
  Plan split = empty_plan(c);
  split.theta[0] = 1;  // k1 needs 2 hours
  split.work[0][0][0] = 1;
  split.work[1][0][1] = 1;
  EXPECT_FALSE(audit_schedule(c, split).ok);

  Plan gap = empty_plan(c);
  gap.theta[0] = 1;
  gap.work[0][0][0] = 1;
  gap.work[0][0][2] = 1;
  EXPECT_FALSE(audit_schedule(c, gap).ok);

  Plan idle = empty_plan(c);
  idle.work[0][0][0] = 1;
  EXPECT_FALSE(audit_schedule(c, idle).ok);

  Plan good = empty_plan(c);
  good.theta[0] = 1;
  good.work[1][0][3] = good.work[1][0][4] = 1;
  EXPECT_TRUE(audit_schedule(c, good).ok);
  const auto grid = schedule_grid(c, good);
  EXPECT_EQ(grid[1], (std::vector<std::string>{"", "", "", "k1", "k1"}));
}

TEST(DropIdleProtection, KeepsOnlyFailingSubstations) {
  const CaseModel& c = sixbus();
  Plan plan = empty_plan(c);
  plan.theta[0] = plan.theta[5] = 1;
  plan.work[0][0][0] = plan.work[0][0][1] = 1;
  const auto set = nested_severity_reduction(c.substations, {1.2});  // only k6 fails
  const Plan kept = drop_idle_protection(c, set, plan);
  EXPECT_EQ(kept.theta, (std::vector<int>{0, 0, 0, 0, 0, 1}));
  EXPECT_EQ(kept.work[0][0], (std::vector<int>{0, 0, 0, 0, 0}));
}

TEST(ScaleParameter, EachDefault) {
  const CaseModel& c = sixbus();
  EXPECT_DOUBLE_EQ(scale_parameter(c, "voll", 0.5).costs.voll, 500.0);
  EXPECT_DOUBLE_EQ(scale_parameter(c, "tiger_dam_cost", 1.5).substations[3].tiger_dam_cost, 7500.0);
  EXPECT_EQ(scale_parameter(c, "operating_horizon", 0.5).operating_horizon, 12);
  EXPECT_DOUBLE_EQ(scale_parameter(c, "line_capacity", 0.5).lines[6].capacity, 75.0);
  EXPECT_DOUBLE_EQ(scale_parameter(c, "susceptance", 1.5).lines[0].susceptance, 15.0);
  EXPECT_DOUBLE_EQ(scale_parameter(c, "angle_bound", 0.5).costs.big_m_angle_bound, 0.3);
  EXPECT_THROW(scale_parameter(c, "nope", 2.0), std::invalid_argument);
}

TEST(CurveCsv, HeaderAndExpectedRows) {
  const auto curve = resilience_curve(sixbus(), reference_scenarios(), theta_of({"k2", "k3", "k5", "k6"}));
  const std::string csv = curve_to_csv(curve);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scenario_id,hour,demand_mw,served_mw,served_pct");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 5 * 25);
  EXPECT_NE(csv.find("\nexpected,0,135"), std::string::npos);
}

}  // namespace
}  // namespace floodguard
