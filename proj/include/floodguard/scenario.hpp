#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "floodguard/domain.hpp"

namespace floodguard {

using FailureMap = std::map<std::string, int>;  // substation id -> 1 failed / 0 survives

struct FailureScenario {
  std::string id;
  FailureMap failed;
  double raw_probability = 0.0;
  double probability = 0.0;

  bool fails(const std::string& substation) const;
  std::vector<std::string> failure_set() const;  // sorted ids of failed substations
};

struct ScenarioSet {
  std::vector<FailureScenario> scenarios;
  bool normalized = false;

  std::size_t size() const { return scenarios.size(); }
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Product over substations of pi_k for failed ones and (1 - pi_k) for
// survivors. Throws ScenarioError when the key sets differ.
double raw_scenario_probability(const FailureMap& failed, const std::map<std::string, double>& fail_probs);

std::map<std::string, double> failure_probabilities(const std::vector<Substation>& subs);

// Rescales raw probabilities to sum to one.
ScenarioSet normalize(ScenarioSet set);

inline constexpr std::size_t kMaxEnumeratedSubstations = 20;

// All 2^K failure combinations with raw probabilities (not normalized).
ScenarioSet enumerate_all(const std::vector<Substation>& subs);

// One scenario per threshold d, failing exactly the substations whose mean
// flood depth is at least d. Thresholds must be strictly decreasing.
ScenarioSet nested_severity_reduction(const std::vector<Substation>& subs,
                                      const std::vector<double>& depth_thresholds);

// The N most probable combinations from the full enumeration, normalized.
// Ties break by lexicographic order of the failure sets.
ScenarioSet top_n_reduction(const std::vector<Substation>& subs, std::size_t n);

// Single scenario in which every substation fails, probability one.
ScenarioSet all_fail_scenario(const std::vector<Substation>& subs);

}  // namespace floodguard
