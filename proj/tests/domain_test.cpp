#include <gtest/gtest.h>

#include "case_fixture.hpp"
#include "floodguard/domain.hpp"

namespace floodguard {
namespace {

using testing::sixbus;

TEST(ValidateCase, BundledCaseIsValid) { EXPECT_TRUE(validate_case(sixbus()).empty()); }

TEST(ValidateCase, ProbabilityAboveOneNamesSubstation) {
  CaseModel c = sixbus();
  c.substations[2].failure_probability = 1.3;
  const auto v = validate_case(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].path.find("k3"), std::string::npos);
  EXPECT_NE(v[0].path.find("failure_probability"), std::string::npos);
}

TEST(ValidateCase, DanglingLineEndpoint) {
  CaseModel c = sixbus();
  c.lines[0].to_bus = "99";
  const auto v = validate_case(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].message.find("99"), std::string::npos);
}

TEST(ValidateCase, NegativeCapacity) {
  CaseModel c = sixbus();
  c.lines[1].capacity = -5.0;
  const auto v = validate_case(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].path.find("capacity"), std::string::npos);
}

TEST(ProtectionTime, ReferenceDepths) {
  EXPECT_EQ(protection_time(0.5, 4), 2);
  EXPECT_EQ(protection_time(0.9, 4), 3);
  EXPECT_EQ(protection_time(0.45, 4), 1);
  EXPECT_EQ(protection_time(1.2, 4), 3);
}

TEST(ProtectionTime, BundledSubstations) {
  std::vector<int> tau;
  for (const auto& s : sixbus().substations) tau.push_back(protection_time(s.mean_flood_depth, 4));
  EXPECT_EQ(tau, (std::vector<int>{2, 3, 2, 3, 2, 3}));
}

TEST(ProtectionTime, OutOfRangeNamesInterval) {
  try {
    protection_time(1.6, 4);
    FAIL() << "expected out_of_range";
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("[0.45, 1.5]"), std::string::npos);
  }
  EXPECT_THROW(protection_time(0.4, 4), std::out_of_range);
}

TEST(ImposedCost, BundledK6) {
  const auto cost = imposed_cost_coefficients(sixbus().substations[5]);
  EXPECT_DOUBLE_EQ(cost.protect_cost, 5000.0);
  EXPECT_DOUBLE_EQ(cost.fail_cost, 83960.0);
}

TEST(ImposedCost, EqualCostsAreNeutral) {
  Substation s = sixbus().substations[0];
  s.tiger_dam_cost = s.damage_cost;
  const auto cost = imposed_cost_coefficients(s);
  EXPECT_DOUBLE_EQ(cost.beta(true), cost.beta(false));
}

TEST(ImposedCost, ZeroDamCost) {
  Substation s = sixbus().substations[0];
  s.tiger_dam_cost = 0.0;
  const auto cost = imposed_cost_coefficients(s);
  EXPECT_DOUBLE_EQ(cost.beta(true), 0.0);
  EXPECT_DOUBLE_EQ(cost.beta(false), s.damage_cost);
}

TEST(RepairHours, CeiledToGrid) {
  EXPECT_EQ(repair_hours(sixbus().substations[3]), 24);
  EXPECT_EQ(repair_hours(sixbus().substations[5]), 25);
}

TEST(WithHorizon, RepeatsProfilesCyclically) {
  CaseModel c = testing::two_bus(7.0, 2);
  c.buses[1].demand_profile = {1.0, 2.0};
  const CaseModel longer = with_horizon(c, 5);
  EXPECT_EQ(longer.operating_horizon, 5);
  EXPECT_EQ(longer.buses[1].demand_profile, (std::vector<double>{1, 2, 1, 2, 1}));
  const CaseModel shorter = with_horizon(c, 1);
  EXPECT_EQ(shorter.buses[1].demand_profile, (std::vector<double>{1}));
  EXPECT_TRUE(validate_case(longer).empty());
  EXPECT_THROW(with_horizon(c, 0), std::invalid_argument);
}

}  // namespace
}  // namespace floodguard
