#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "floodguard/domain.hpp"
#include "floodguard/model.hpp"
#include "floodguard/scenario.hpp"

namespace floodguard {

// Variable positions of the protection model, by role. Crew arrays are
// indexed [team][substation][hour]; scenario arrays [scenario][...];
// dispatch arrays [scenario][hour][element].
struct ModelIndex {
  std::vector<int> theta;
  std::vector<std::vector<std::vector<int>>> x, y;
  std::vector<int> beta;
  std::vector<std::vector<int>> h_sub, h_line;
  std::vector<std::vector<std::vector<int>>> p, ls, flow, angle;
  int slack_bus = 0;
};

struct ProtectionModel {
  MilpInstance instance;
  ModelIndex index;
  std::vector<int> protection_hours;  // tau_k
};

// M for the flow/angle disjunction of one line: the largest |flow coefficient *
// angle difference| reachable inside the angle box.
double big_m_for_line(const Line& line, double angle_bound, double base_mva = 1.0);

// Rising-edge detector rows for one (team, substation, hour):
//   (x_t - x_prev)/2 - eps <= y_t   and   y_t <= (1 + x_t - x_prev)/2 + eps.
// `x_prev` is empty for the first hour (treated as 0).
std::pair<LinearConstraint, LinearConstraint> crew_edge_constraints(int x_t, std::optional<int> x_prev,
                                                                    int y_t, double epsilon);

struct BuildOptions {
  // Adds, per team and substation, sum_t x = tau_k * sum_t y: a team that
  // starts a site does all of its hours. Every schedule satisfying the crew
  // rows already meets it; it only tightens the relaxation.
  bool crew_assignment_rows = true;
};

// Deterministic equivalent over a normalized scenario set. Throws
// std::invalid_argument when the set is not normalized or does not cover
// every substation, and std::out_of_range when a flood depth lies outside
// the tiger dam sizing range.
ProtectionModel build(const CaseModel& c, const ScenarioSet& scenarios, const BuildOptions& options = {});

}  // namespace floodguard
