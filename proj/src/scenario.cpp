#include "floodguard/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace floodguard {

bool FailureScenario::fails(const std::string& substation) const {
  const auto it = failed.find(substation);
  return it != failed.end() && it->second != 0;
}

std::vector<std::string> FailureScenario::failure_set() const {
  std::vector<std::string> out;
  for (const auto& [id, f] : failed)
    if (f) out.push_back(id);
  return out;
}

double raw_scenario_probability(const FailureMap& failed, const std::map<std::string, double>& fail_probs) {
  std::vector<std::string> missing;
  for (const auto& [id, p] : fail_probs)
    if (!failed.count(id)) missing.push_back(id);
  for (const auto& [id, f] : failed)
    if (!fail_probs.count(id)) missing.push_back(id);
  if (!missing.empty()) {
    std::ostringstream s;
    s << "failure indicator and probability maps disagree on substations:";
    for (const auto& id : missing) s << ' ' << id;
    throw ScenarioError(s.str());
  }
  double prob = 1.0;
  for (const auto& [id, f] : failed) {
    if (f != 0 && f != 1) throw ScenarioError("failure indicator for " + id + " must be 0 or 1");
    const double pk = fail_probs.at(id);
    prob *= f ? pk : 1.0 - pk;
  }
  return prob;
}

std::map<std::string, double> failure_probabilities(const std::vector<Substation>& subs) {
  std::map<std::string, double> out;
  for (const auto& s : subs) out[s.id] = s.failure_probability;
  return out;
}

ScenarioSet normalize(ScenarioSet set) {
  double total = 0.0;
  for (const auto& s : set.scenarios) total += s.raw_probability;
  if (!(total > 0.0)) throw ScenarioError("cannot normalize: every scenario has zero raw probability");
  for (auto& s : set.scenarios) s.probability = s.raw_probability / total;
  set.normalized = true;
  return set;
}

ScenarioSet enumerate_all(const std::vector<Substation>& subs) {
  if (subs.size() > kMaxEnumeratedSubstations)
    throw ScenarioError("enumeration limited to " + std::to_string(kMaxEnumeratedSubstations) +
                        " substations, got " + std::to_string(subs.size()));
  const auto probs = failure_probabilities(subs);
  const std::size_t count = std::size_t{1} << subs.size();
  ScenarioSet set;
  set.scenarios.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    FailureScenario sc;
    sc.id = "S" + std::to_string(mask + 1);
    for (std::size_t k = 0; k < subs.size(); ++k) sc.failed[subs[k].id] = (mask >> k) & 1U;
    sc.raw_probability = raw_scenario_probability(sc.failed, probs);
    sc.probability = sc.raw_probability;
    set.scenarios.push_back(std::move(sc));
  }
  return set;
}

ScenarioSet nested_severity_reduction(const std::vector<Substation>& subs,
                                      const std::vector<double>& depth_thresholds) {
  if (depth_thresholds.empty()) throw ScenarioError("at least one depth threshold is required");
  std::set<double> unique(depth_thresholds.begin(), depth_thresholds.end());
  if (unique.size() != depth_thresholds.size()) throw ScenarioError("depth thresholds must be distinct");
  for (std::size_t i = 1; i < depth_thresholds.size(); ++i)
    if (!(depth_thresholds[i] < depth_thresholds[i - 1]))
      throw ScenarioError("depth thresholds must be strictly decreasing");
  for (double d : depth_thresholds)
    if (!(d >= 0.0)) throw ScenarioError("depth thresholds must be >= 0");

  const auto probs = failure_probabilities(subs);
  ScenarioSet set;
  for (std::size_t i = 0; i < depth_thresholds.size(); ++i) {
    FailureScenario sc;
    sc.id = "S" + std::to_string(i + 1);
    for (const auto& s : subs) sc.failed[s.id] = s.mean_flood_depth >= depth_thresholds[i] ? 1 : 0;
    sc.raw_probability = raw_scenario_probability(sc.failed, probs);
    set.scenarios.push_back(std::move(sc));
  }
  return normalize(std::move(set));
}

ScenarioSet top_n_reduction(const std::vector<Substation>& subs, std::size_t n) {
  if (n == 0) throw ScenarioError("top-N reduction needs N >= 1");
  ScenarioSet all = enumerate_all(subs);
  std::vector<std::size_t> order(all.scenarios.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<std::string>> sets;
  sets.reserve(all.scenarios.size());
  for (const auto& s : all.scenarios) sets.push_back(s.failure_set());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double pa = all.scenarios[a].raw_probability;
    const double pb = all.scenarios[b].raw_probability;
    if (pa != pb) return pa > pb;
    return sets[a] < sets[b];
  });
  ScenarioSet out;
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) {
    FailureScenario sc = all.scenarios[order[i]];
    sc.id = "S" + std::to_string(i + 1);
    out.scenarios.push_back(std::move(sc));
  }
  return normalize(std::move(out));
}

ScenarioSet all_fail_scenario(const std::vector<Substation>& subs) {
  ScenarioSet set;
  FailureScenario sc;
  sc.id = "S1";
  for (const auto& s : subs) sc.failed[s.id] = 1;
  sc.raw_probability = 1.0;
  sc.probability = 1.0;
  set.scenarios.push_back(std::move(sc));
  set.normalized = true;
  return set;
}

}  // namespace floodguard
