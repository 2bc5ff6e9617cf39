#include <gtest/gtest.h>

#include <sstream>

#include "case_fixture.hpp"
#include "floodguard/lp.hpp"
#include "floodguard/milp.hpp"
#include "floodguard/mip.hpp"
#include "floodguard/mps.hpp"

namespace floodguard {
namespace {

MilpInstance one_var_lp() {
  MilpInstance inst;
  inst.catalog.add({"x", VarKind::Continuous, 0.0, kInf});
  inst.objective = {{0, 1.0}};
  LinearConstraint c;
  c.terms = {{0, 1.0}};
  c.sense = Sense::GreaterEqual;
  c.rhs = 1.0;
  inst.constraints.push_back(c);
  return inst;
}

CaseModel one_bus() {
  CaseModel c;
  c.operating_horizon = 1;
  c.buses = {{"a", {20.0}}};
  Generator g;
  g.id = "G";
  g.bus_id = "a";
  g.p_max = 15.0;
  g.ramp_up = g.ramp_down = 15.0;
  c.generators = {g};
  c.substations = {{"k", "a", 0.45, 0.4, 3.0, 9000.0, 500.0}};
  c.crew.num_teams = 1;
  c.crew.members_per_team = 4;
  c.crew.prep_hours = 1;
  return c;
}

MpsModel round_trip(const MilpInstance& inst) {
  std::istringstream in(export_mps(inst));
  return import_mps(in);
}

MpsModel parse(const std::string& text) {
  std::istringstream in(text);
  return import_mps(in);
}

TEST(MpsNumber, ShortestRoundTrip) {
  EXPECT_EQ(mps_number(0.1), "0.1");
  EXPECT_EQ(mps_number(83960.0), "83960");
  EXPECT_EQ(mps_number(-2.0), "-2");
  EXPECT_EQ(mps_number(1e-20), "1e-20");
  EXPECT_EQ(mps_number(0.0), "0");
  EXPECT_EQ(mps_number(-0.0), "0");
}

TEST(MpsNumber, LongValuesFitField) {
  const std::string s = mps_number(1.0 / 3.0);
  EXPECT_LE(s.size(), 12u);
  EXPECT_NEAR(std::stod(s), 1.0 / 3.0, 1e-10);
  EXPECT_THROW(mps_number(kInf), std::invalid_argument);
}

TEST(ExportMps, OneVariableText) {
  const std::string text = export_mps(one_var_lp(), "TINY");
  EXPECT_EQ(text,
            "NAME          TINY\n"
            "ROWS\n"
            " N  COST\n"
            " G  R1\n"
            "COLUMNS\n"
            "    C1        COST      1              R1        1\n"
            "RHS\n"
            "    RHS       R1        1\n"
            "BOUNDS\n"
            "ENDATA\n");
  const auto back = round_trip(one_var_lp());
  const auto r = solve_lp(back.instance);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_DOUBLE_EQ(r.objective, 1.0);
}

TEST(ExportMps, NoConstraintsOptimumAtBounds) {
  MilpInstance inst;
  inst.catalog.add({"a", VarKind::Continuous, -2.0, 3.0});
  inst.catalog.add({"b", VarKind::Continuous, 1.0, 4.0});
  inst.catalog.add({"c", VarKind::Binary, 0.0, 1.0});
  inst.objective = {{0, 1.0}, {1, -2.0}, {2, -1.0}};
  const auto back = round_trip(inst);
  EXPECT_TRUE(back.instance.constraints.empty());
  const auto r = solve_mip(back.instance);
  ASSERT_EQ(r.status, MipStatus::Optimal);
  EXPECT_DOUBLE_EQ(r.objective, -2.0 - 8.0 - 1.0);
}

TEST(ExportMps, BoundKinds) {
  MilpInstance inst;
  inst.catalog.add({"free", VarKind::Continuous, -kInf, kInf});
  inst.catalog.add({"fixed", VarKind::Continuous, 2.5, 2.5});
  inst.catalog.add({"neg", VarKind::Continuous, -kInf, 4.0});
  inst.catalog.add({"box", VarKind::Continuous, -1.0, 7.0});
  inst.catalog.add({"bin", VarKind::Binary, 0.0, 1.0});
  const auto back = round_trip(inst).instance;
  ASSERT_EQ(back.catalog.size(), 5u);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(back.catalog[j].lower, inst.catalog[j].lower) << j;
    EXPECT_EQ(back.catalog[j].upper, inst.catalog[j].upper) << j;
    EXPECT_EQ(back.catalog[j].kind, inst.catalog[j].kind) << j;
  }
}

TEST(ExportMps, OneBusCaseIsSmallAndRoundTrips) {
  const CaseModel c = one_bus();
  ASSERT_TRUE(validate_case(c).empty());
  const auto model = build(c, all_fail_scenario(c.substations));
  const std::string text = export_mps(model.instance);
  EXPECT_LT(std::count(text.begin(), text.end(), '\n'), 50);
  const auto a = solve_mip(model.instance);
  const auto b = solve_mip(round_trip(model.instance).instance);
  ASSERT_EQ(a.status, MipStatus::Optimal);
  ASSERT_EQ(b.status, MipStatus::Optimal);
  EXPECT_NEAR(a.objective, b.objective, 1e-4 * std::abs(a.objective));
  // protect for 500 rather than pay 9000, shed 5 MW for one hour at 1000/MWh
  EXPECT_NEAR(a.objective, 500.0 + 5.0 * 1000.0, 1e-6);
}

TEST(ExportMps, SixBusRoundTripKeepsCoefficients) {
  const CaseModel& c = testing::sixbus();
  const auto model = build(c, nested_severity_reduction(c.substations, {1.2, 1.1, 0.8, 0.5}));
  const auto back = round_trip(model.instance).instance;
  ASSERT_EQ(back.catalog.size(), model.instance.catalog.size());
  ASSERT_EQ(back.constraints.size(), model.instance.constraints.size());
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); };
  for (std::size_t i = 0; i < back.constraints.size(); ++i) {
    const auto& x = model.instance.constraints[i];
    const auto& y = back.constraints[i];
    ASSERT_EQ(x.sense, y.sense);
    ASSERT_TRUE(close(x.rhs, y.rhs));
    std::map<int, double> want;
    for (const auto& t : x.terms) want[t.var] += t.coef;
    std::erase_if(want, [](const auto& kv) { return kv.second == 0.0; });
    ASSERT_EQ(want.size(), y.terms.size()) << "row " << i;
    for (const auto& t : y.terms) ASSERT_TRUE(close(want[t.var], t.coef)) << "row " << i;
  }
  const auto a = solve_lp(model.instance);
  const auto b = solve_lp(back);
  ASSERT_EQ(a.status, LpStatus::Optimal);
  ASSERT_EQ(b.status, LpStatus::Optimal);
  EXPECT_NEAR(a.objective, b.objective, 1e-6 * std::abs(a.objective));
}

TEST(ImportMps, MarkersAndMaximize) {
  const auto m = parse(
      "NAME T\n"
      "OBJSENSE\n"
      "    MAX\n"
      "ROWS\n"
      " N obj\n"
      " L cap\n"
      "COLUMNS\n"
      "    M1 'MARKER' 'INTORG'\n"
      "    a obj 3 cap 2\n"
      "    b obj 2 cap 2\n"
      "    M2 'MARKER' 'INTEND'\n"
      "    z obj 1 cap 1\n"
      "RHS\n"
      "    rhs cap 3\n"
      "BOUNDS\n"
      " UP bnd z 0.5\n"
      "ENDATA\n");
  EXPECT_EQ(m.name, "T");
  ASSERT_EQ(m.instance.catalog.size(), 3u);
  EXPECT_TRUE(m.instance.catalog[0].is_binary());
  EXPECT_TRUE(m.instance.catalog[1].is_binary());
  EXPECT_FALSE(m.instance.catalog[2].is_binary());
  const auto r = solve_mip(m.instance);
  ASSERT_EQ(r.status, MipStatus::Optimal);
  // max 3a + 2b + z, 2a + 2b + z <= 3, z <= 0.5: a = 1, z = 0.5
  EXPECT_NEAR(r.objective, -3.5, 1e-9);
}

TEST(ImportMps, Errors) {
  const std::string head = "NAME T\nROWS\n N obj\n L r\nCOLUMNS\n    x obj 1 r 1\n";
  EXPECT_THROW(parse(head + "RHS\n    rhs r 1\n"), FormatError);
  EXPECT_THROW(parse(head + "RANGES\n    rng r 1\nENDATA\n"), FormatError);
  EXPECT_THROW(parse(head + "RHS\n    rhs r abc\nENDATA\n"), FormatError);
  EXPECT_THROW(parse(head + "RHS\n    rhs q 1\nENDATA\n"), FormatError);
  EXPECT_THROW(parse(head + "BOUNDS\n UI bnd x 3\nENDATA\n"), FormatError);
  EXPECT_THROW(parse(head + "RHS\n    rhs obj 4\nENDATA\n"), FormatError);
  EXPECT_NO_THROW(parse(head + "ENDATA\n"));
}

TEST(WriteMps, UnwritablePath) {
  EXPECT_THROW(write_mps(one_var_lp(), "/nonexistent-dir/model.mps"), std::runtime_error);
}

}  // namespace
}  // namespace floodguard
