#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace floodguard {

struct Substation {
  std::string id;
  std::string bus_id;
  double mean_flood_depth = 0.0;     // m
  double failure_probability = 0.0;
  double repair_time = 0.0;          // h
  double damage_cost = 0.0;          // $
  double tiger_dam_cost = 0.0;       // $
};

struct Bus {
  std::string id;
  std::vector<double> demand_profile;  // MW per operating hour
};

struct Line {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  double susceptance = 0.0;  // p.u. on the case base
  double capacity = 0.0;     // MW
};

struct Generator {
  std::string id;
  std::string bus_id;
  double p_min = 0.0;
  double p_max = 0.0;
  double ramp_up = 0.0;    // MW/h
  double ramp_down = 0.0;  // MW/h
  // Output in the hour before the operating horizon. When unset the first
  // hour is not ramp-constrained.
  std::optional<double> initial_output;
};

struct CrewConfig {
  int num_teams = 0;
  int members_per_team = 1;
  int prep_hours = 0;          // hours available on the protection day
  double edge_epsilon = 0.25;  // dispatch-edge tolerance, in (0, 0.5)
};

struct CostConfig {
  double voll = 1000.0;              // $/MWh
  double big_m_angle_bound = 0.6;    // rad
};

struct CaseModel {
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<Substation> substations;
  CrewConfig crew;
  CostConfig costs;
  int operating_horizon = 24;  // h
  double base_mva = 1.0;       // line flow = base_mva * susceptance * angle difference
  // When false a generator may run anywhere in [0, P_max] while its
  // substation is available; when true the minimum output is enforced.
  bool enforce_generator_minimum = false;
  std::vector<double> scenario_thresholds;  // default nested-severity cuts, may be empty

  int bus_index(const std::string& id) const;          // -1 when absent
  int substation_index(const std::string& id) const;   // -1 when absent
  // Index of the substation serving bus i.
  int substation_of_bus(int bus) const;
};

struct Violation {
  std::string path;
  std::string message;
};

// Every invariant violation of the case; empty when valid.
std::vector<Violation> validate_case(const CaseModel& c);

inline constexpr double kMinDamDepth = 0.45;
inline constexpr double kMaxDamDepth = 1.5;

// Whole crew-hours needed to place tiger dams around a substation with mean
// flood depth `depth_m`, given team size. Throws std::out_of_range outside
// [0.45, 1.5] m.
int protection_time(double depth_m, int members_per_team);

struct ImposedCost {
  double protect_cost;  // C_k, incurred when protected
  double fail_cost;     // DC_k, incurred when unprotected
  double beta(bool protect) const { return protect ? protect_cost : fail_cost; }
};

ImposedCost imposed_cost_coefficients(const Substation& sub);

// Copy with a different operating horizon; demand profiles are repeated
// cyclically (or truncated) to the new length.
CaseModel with_horizon(const CaseModel& c, int hours);

// Repair time rounded up to the hourly grid.
int repair_hours(const Substation& sub);

}  // namespace floodguard
