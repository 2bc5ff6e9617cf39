#include "floodguard/domain.hpp"

#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace floodguard {

int CaseModel::bus_index(const std::string& id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == id) return static_cast<int>(i);
  return -1;
}

int CaseModel::substation_index(const std::string& id) const {
  for (std::size_t k = 0; k < substations.size(); ++k)
    if (substations[k].id == id) return static_cast<int>(k);
  return -1;
}

int CaseModel::substation_of_bus(int bus) const {
  for (std::size_t k = 0; k < substations.size(); ++k)
    if (substations[k].bus_id == buses[bus].id) return static_cast<int>(k);
  return -1;
}

namespace {

class Collector {
 public:
  void add(std::string path, std::string message) {
    out_.push_back({std::move(path), std::move(message)});
  }
  void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) add(path, message);
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

std::string at(const char* list, std::size_t i, const std::string& id, const char* field) {
  std::ostringstream s;
  s << list << '[' << i << ']';
  if (!id.empty()) s << '(' << id << ')';
  s << '.' << field;
  return s.str();
}

}  // namespace

std::vector<Violation> validate_case(const CaseModel& c) {
  Collector v;
  v.require(c.operating_horizon >= 1, "operating_horizon", "must be at least 1 hour");
  v.require(c.base_mva > 0.0, "base_mva", "must be positive");

  std::set<std::string> bus_ids;
  for (std::size_t i = 0; i < c.buses.size(); ++i) {
    const auto& b = c.buses[i];
    v.require(bus_ids.insert(b.id).second, at("buses", i, b.id, "id"), "duplicate bus id");
    if (static_cast<int>(b.demand_profile.size()) != c.operating_horizon)
      v.add(at("buses", i, b.id, "demand_profile"),
            "length " + std::to_string(b.demand_profile.size()) + " differs from operating_horizon " +
                std::to_string(c.operating_horizon));
    for (double p : b.demand_profile) {
      if (!(p >= 0.0)) {
        v.add(at("buses", i, b.id, "demand_profile"), "demand must be >= 0");
        break;
      }
    }
  }

  std::set<std::string> line_ids;
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const auto& ln = c.lines[l];
    v.require(line_ids.insert(ln.id).second, at("lines", l, ln.id, "id"), "duplicate line id");
    v.require(ln.capacity > 0.0, at("lines", l, ln.id, "capacity"), "must be > 0");
    v.require(ln.susceptance > 0.0, at("lines", l, ln.id, "susceptance"), "must be > 0");
    v.require(ln.from_bus != ln.to_bus, at("lines", l, ln.id, "to_bus"), "line endpoints must differ");
    v.require(bus_ids.count(ln.from_bus) > 0, at("lines", l, ln.id, "from_bus"),
              "references missing bus '" + ln.from_bus + "'");
    v.require(bus_ids.count(ln.to_bus) > 0, at("lines", l, ln.id, "to_bus"),
              "references missing bus '" + ln.to_bus + "'");
  }

  std::set<std::string> gen_ids;
  for (std::size_t g = 0; g < c.generators.size(); ++g) {
    const auto& gen = c.generators[g];
    v.require(gen_ids.insert(gen.id).second, at("generators", g, gen.id, "id"), "duplicate generator id");
    v.require(bus_ids.count(gen.bus_id) > 0, at("generators", g, gen.id, "bus_id"),
              "references missing bus '" + gen.bus_id + "'");
    v.require(gen.p_min >= 0.0, at("generators", g, gen.id, "p_min"), "must be >= 0");
    v.require(gen.p_min <= gen.p_max, at("generators", g, gen.id, "p_max"), "must be >= p_min");
    v.require(gen.ramp_up > 0.0, at("generators", g, gen.id, "ramp_up"), "must be > 0");
    v.require(gen.ramp_down > 0.0, at("generators", g, gen.id, "ramp_down"), "must be > 0");
    if (gen.initial_output)
      v.require(*gen.initial_output >= 0.0 && *gen.initial_output <= gen.p_max,
                at("generators", g, gen.id, "initial_output"), "must lie in [0, p_max]");
  }

  std::set<std::string> sub_ids;
  std::set<std::string> served;
  for (std::size_t k = 0; k < c.substations.size(); ++k) {
    const auto& s = c.substations[k];
    v.require(sub_ids.insert(s.id).second, at("substations", k, s.id, "id"), "duplicate substation id");
    v.require(s.failure_probability >= 0.0 && s.failure_probability <= 1.0,
              at("substations", k, s.id, "failure_probability"), "must lie in [0, 1]");
    v.require(s.mean_flood_depth >= 0.0, at("substations", k, s.id, "mean_flood_depth"), "must be >= 0");
    v.require(s.repair_time >= 0.0, at("substations", k, s.id, "repair_time"), "must be >= 0");
    v.require(s.damage_cost >= 0.0, at("substations", k, s.id, "damage_cost"), "must be >= 0");
    v.require(s.tiger_dam_cost >= 0.0, at("substations", k, s.id, "tiger_dam_cost"), "must be >= 0");
    if (bus_ids.count(s.bus_id) == 0) {
      v.add(at("substations", k, s.id, "bus_id"), "references missing bus '" + s.bus_id + "'");
    } else if (!served.insert(s.bus_id).second) {
      v.add(at("substations", k, s.id, "bus_id"), "bus '" + s.bus_id + "' already has a substation");
    }
  }
  for (std::size_t i = 0; i < c.buses.size(); ++i)
    v.require(served.count(c.buses[i].id) > 0, at("buses", i, c.buses[i].id, "id"), "bus has no substation");

  v.require(c.crew.num_teams >= 0, "crew.num_teams", "must be >= 0");
  v.require(c.crew.members_per_team >= 1, "crew.members_per_team", "must be >= 1");
  v.require(c.crew.prep_hours >= 0, "crew.prep_hours", "must be >= 0");
  v.require(c.crew.edge_epsilon > 0.0 && c.crew.edge_epsilon < 0.5, "crew.edge_epsilon",
            "must lie in (0, 0.5)");
  v.require(c.costs.voll > 0.0, "costs.voll", "must be > 0");
  v.require(c.costs.big_m_angle_bound > 0.0, "costs.big_m_angle_bound", "must be > 0");

  // Connectivity with every substation available.
  if (!c.buses.empty()) {
    std::vector<std::vector<int>> adj(c.buses.size());
    for (const auto& ln : c.lines) {
      const int a = c.bus_index(ln.from_bus);
      const int b = c.bus_index(ln.to_bus);
      if (a < 0 || b < 0) continue;
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::vector<char> seen(c.buses.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : adj[u])
        if (!seen[w]) seen[w] = 1, q.push(w);
    }
    for (std::size_t i = 0; i < c.buses.size(); ++i)
      if (!seen[i]) v.add(at("buses", i, c.buses[i].id, "id"), "bus is not connected to the network");
  }
  return v.take();
}

int protection_time(double depth_m, int members_per_team) {
  if (!(depth_m >= kMinDamDepth && depth_m <= kMaxDamDepth)) {
    std::ostringstream s;
    s << "mean flood depth " << depth_m << " m is outside the tiger dam sizing range [" << kMinDamDepth
      << ", " << kMaxDamDepth << "] m";
    throw std::out_of_range(s.str());
  }
  if (members_per_team < 1) throw std::invalid_argument("members_per_team must be >= 1");
  const double hours = (4.0 + 10.0 * (depth_m - kMinDamDepth)) / members_per_team;
  // Guard against representation error such as 2.0000000000000004.
  const int whole = static_cast<int>(std::ceil(hours - 1e-9));
  return std::max(whole, 1);
}

ImposedCost imposed_cost_coefficients(const Substation& sub) {
  return {sub.tiger_dam_cost, sub.damage_cost};
}

int repair_hours(const Substation& sub) {
  return static_cast<int>(std::ceil(sub.repair_time - 1e-9));
}

CaseModel with_horizon(const CaseModel& c, int hours) {
  if (hours < 1) throw std::invalid_argument("operating horizon must be at least 1 hour");
  CaseModel out = c;
  for (auto& b : out.buses) {
    std::vector<double> profile(hours, 0.0);
    if (!b.demand_profile.empty())
      for (int t = 0; t < hours; ++t) profile[t] = b.demand_profile[t % b.demand_profile.size()];
    b.demand_profile = std::move(profile);
  }
  out.operating_horizon = hours;
  return out;
}

}  // namespace floodguard
