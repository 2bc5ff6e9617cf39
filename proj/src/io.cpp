#include "floodguard/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace floodguard {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(path + "." + key + ": missing");
  return *it;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw FormatError(path + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FormatError(path + ": expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw FormatError(path + ": expected a string");
}

double number_at(const json& j, const char* key, const std::string& path) {
  return number(need(j, key, path), join(path, key));
}
std::string text_at(const json& j, const char* key, const std::string& path) {
  return text(need(j, key, path), join(path, key));
}

template <class F>
void each(const json& j, const char* key, F&& f) {
  const json& arr = need(j, key, "");
  if (!arr.is_array()) throw FormatError(std::string(key) + ": expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) f(arr[i], std::string(key) + "[" + std::to_string(i) + "]");
}

}  // namespace

CaseModel case_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("case: expected a JSON object");
  CaseModel c;
  if (j.contains("operating_horizon")) c.operating_horizon = integer(j["operating_horizon"], "operating_horizon");
  if (j.contains("base_mva")) c.base_mva = number(j["base_mva"], "base_mva");
  if (j.contains("enforce_generator_minimum")) {
    if (!j["enforce_generator_minimum"].is_boolean()) throw FormatError("enforce_generator_minimum: expected a boolean");
    c.enforce_generator_minimum = j["enforce_generator_minimum"].get<bool>();
  }
  if (j.contains("scenario_thresholds")) {
    const json& t = j["scenario_thresholds"];
    if (!t.is_array()) throw FormatError("scenario_thresholds: expected an array");
    for (std::size_t i = 0; i < t.size(); ++i)
      c.scenario_thresholds.push_back(number(t[i], "scenario_thresholds[" + std::to_string(i) + "]"));
  }

  each(j, "buses", [&](const json& b, const std::string& p) {
    Bus bus;
    bus.id = text_at(b, "id", p);
    const json& prof = need(b, "demand_profile", p);
    if (!prof.is_array()) throw FormatError(p + ".demand_profile: expected an array");
    for (std::size_t t = 0; t < prof.size(); ++t)
      bus.demand_profile.push_back(number(prof[t], p + ".demand_profile[" + std::to_string(t) + "]"));
    c.buses.push_back(std::move(bus));
  });
  each(j, "lines", [&](const json& l, const std::string& p) {
    Line line;
    line.id = text_at(l, "id", p);
    line.from_bus = text_at(l, "from_bus", p);
    line.to_bus = text_at(l, "to_bus", p);
    line.susceptance = number_at(l, "susceptance", p);
    line.capacity = number_at(l, "capacity", p);
    c.lines.push_back(std::move(line));
  });
  each(j, "generators", [&](const json& g, const std::string& p) {
    Generator gen;
    gen.id = text_at(g, "id", p);
    gen.bus_id = text_at(g, "bus_id", p);
    gen.p_min = number_at(g, "p_min", p);
    gen.p_max = number_at(g, "p_max", p);
    gen.ramp_up = number_at(g, "ramp_up", p);
    gen.ramp_down = number_at(g, "ramp_down", p);
    if (g.contains("initial_output") && !g["initial_output"].is_null())
      gen.initial_output = number(g["initial_output"], p + ".initial_output");
    c.generators.push_back(std::move(gen));
  });
  each(j, "substations", [&](const json& s, const std::string& p) {
    Substation sub;
    sub.id = text_at(s, "id", p);
    sub.bus_id = text_at(s, "bus_id", p);
    sub.mean_flood_depth = number_at(s, "mean_flood_depth", p);
    sub.failure_probability = number_at(s, "failure_probability", p);
    sub.repair_time = number_at(s, "repair_time", p);
    sub.damage_cost = number_at(s, "damage_cost", p);
    sub.tiger_dam_cost = number_at(s, "tiger_dam_cost", p);
    c.substations.push_back(std::move(sub));
  });

  const json& crew = need(j, "crew", "");
  c.crew.num_teams = integer(need(crew, "num_teams", "crew"), "crew.num_teams");
  c.crew.members_per_team = integer(need(crew, "members_per_team", "crew"), "crew.members_per_team");
  c.crew.prep_hours = integer(need(crew, "prep_hours", "crew"), "crew.prep_hours");
  if (crew.contains("edge_epsilon")) c.crew.edge_epsilon = number(crew["edge_epsilon"], "crew.edge_epsilon");

  const json& costs = need(j, "costs", "");
  c.costs.voll = number_at(costs, "voll", "costs");
  if (costs.contains("big_m_angle_bound"))
    c.costs.big_m_angle_bound = number(costs["big_m_angle_bound"], "costs.big_m_angle_bound");
  return c;
}

json case_to_json(const CaseModel& c) {
  json j;
  j["operating_horizon"] = c.operating_horizon;
  j["base_mva"] = c.base_mva;
  j["enforce_generator_minimum"] = c.enforce_generator_minimum;
  j["scenario_thresholds"] = c.scenario_thresholds;
  j["buses"] = json::array();
  for (const auto& b : c.buses) j["buses"].push_back({{"id", b.id}, {"demand_profile", b.demand_profile}});
  j["lines"] = json::array();
  for (const auto& l : c.lines)
    j["lines"].push_back({{"id", l.id},
                          {"from_bus", l.from_bus},
                          {"to_bus", l.to_bus},
                          {"susceptance", l.susceptance},
                          {"capacity", l.capacity}});
  j["generators"] = json::array();
  for (const auto& g : c.generators) {
    json gj{{"id", g.id},           {"bus_id", g.bus_id},       {"p_min", g.p_min},
            {"p_max", g.p_max},     {"ramp_up", g.ramp_up},     {"ramp_down", g.ramp_down}};
    if (g.initial_output) gj["initial_output"] = *g.initial_output;
    j["generators"].push_back(std::move(gj));
  }
  j["substations"] = json::array();
  for (const auto& s : c.substations)
    j["substations"].push_back({{"id", s.id},
                                {"bus_id", s.bus_id},
                                {"mean_flood_depth", s.mean_flood_depth},
                                {"failure_probability", s.failure_probability},
                                {"repair_time", s.repair_time},
                                {"damage_cost", s.damage_cost},
                                {"tiger_dam_cost", s.tiger_dam_cost}});
  j["crew"] = {{"num_teams", c.crew.num_teams},
               {"members_per_team", c.crew.members_per_team},
               {"prep_hours", c.crew.prep_hours},
               {"edge_epsilon", c.crew.edge_epsilon}};
  j["costs"] = {{"voll", c.costs.voll}, {"big_m_angle_bound", c.costs.big_m_angle_bound}};
  return j;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

CaseModel load_case(const std::filesystem::path& path) { return case_from_json(read_json(path)); }

ScenarioSet scenarios_from_json(const json& j, const std::vector<Substation>& subs,
                                std::vector<std::string>* warnings) {
  const json& list = j.is_array() ? j : need(j, "scenarios", "");
  if (!list.is_array()) throw FormatError("scenarios: expected an array");
  ScenarioSet set;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = "scenarios[" + std::to_string(i) + "]";
    FailureScenario sc;
    sc.id = text_at(list[i], "id", p);
    if (!ids.insert(sc.id).second) throw FormatError(p + ".id: duplicate scenario id '" + sc.id + "'");
    const json& failed = need(list[i], "failed", p);
    if (!failed.is_object()) throw FormatError(p + ".failed: expected an object");
    for (const auto& [k, v] : failed.items()) {
      const int f = integer(v, p + ".failed." + k);
      if (f != 0 && f != 1) throw FormatError(p + ".failed." + k + ": indicator must be 0 or 1");
      sc.failed[k] = f;
    }
    std::vector<std::string> missing;
    for (const auto& s : subs)
      if (!sc.failed.count(s.id)) missing.push_back(s.id);
    for (const auto& [k, v] : sc.failed) {
      bool known = false;
      for (const auto& s : subs) known = known || s.id == k;
      if (!known) throw FormatError(p + ".failed." + k + ": unknown substation");
    }
    if (!missing.empty()) {
      std::string m;
      for (const auto& id : missing) m += " " + id;
      throw FormatError(p + ".failed: missing substations" + m);
    }
    sc.raw_probability = number_at(list[i], "probability", p);
    if (!(sc.raw_probability >= 0.0 && sc.raw_probability <= 1.0))
      throw FormatError(p + ".probability: must lie in [0, 1]");
    set.scenarios.push_back(std::move(sc));
  }
  double total = 0.0;
  for (const auto& s : set.scenarios) total += s.raw_probability;
  if (std::abs(total - 1.0) > 1e-6 && warnings) {
    std::ostringstream w;
    w << "scenario probabilities sum to " << total << "; renormalized";
    warnings->push_back(w.str());
  }
  try {
    return normalize(std::move(set));
  } catch (const ScenarioError& e) {
    throw FormatError(std::string("scenarios: ") + e.what());
  }
}

json scenarios_to_json(const ScenarioSet& set) {
  json list = json::array();
  for (const auto& s : set.scenarios) {
    json failed = json::object();
    for (const auto& [k, v] : s.failed) failed[k] = v;
    list.push_back({{"id", s.id},
                    {"failed", failed},
                    {"raw_probability", s.raw_probability},
                    {"probability", s.probability}});
  }
  return {{"normalized", set.normalized}, {"scenarios", list}};
}

ScenarioSet load_scenarios(const std::filesystem::path& path, const std::vector<Substation>& subs,
                           std::vector<std::string>* warnings) {
  return scenarios_from_json(read_json(path), subs, warnings);
}

json catalog_dump(const MilpInstance& inst) {
  json vars = json::array();
  for (std::size_t v = 0; v < inst.catalog.size(); ++v) {
    const auto& e = inst.catalog[v];
    vars.push_back({{"index", v},
                    {"name", e.name},
                    {"kind", e.kind == VarKind::Binary ? "binary" : "continuous"},
                    {"lower", e.lower},
                    {"upper", e.upper},
                    {"role", std::string(role_name(e.role))}});
  }
  json rows = json::array();
  for (std::size_t r = 0; r < inst.constraints.size(); ++r) {
    const auto& c = inst.constraints[r];
    json terms = json::array();
    for (const auto& t : c.terms) terms.push_back({t.var, t.coef});
    const char* sense = c.sense == Sense::LessEqual ? "<=" : c.sense == Sense::Equal ? "=" : ">=";
    rows.push_back({{"index", r}, {"family", std::string(family_name(c.family))}, {"sense", sense}, {"rhs", c.rhs}, {"terms", terms}});
  }
  json obj = json::array();
  for (const auto& t : inst.objective) obj.push_back({t.var, t.coef});
  return {{"variables", vars}, {"constraints", rows}, {"objective", obj}, {"big_m", inst.big_m},
          {"line_big_m", inst.line_big_m}, {"warnings", inst.warnings}};
}

namespace {

double clean(double v) { return v == 0.0 ? 0.0 : v; }

json delta_json(const Delta& d) {
  json j{{"absolute", clean(d.absolute)}};
  j["percent"] = d.percent ? json(clean(*d.percent)) : json(nullptr);
  return j;
}

json outage_json(const OutageMetrics& m) {
  return {{"magnitude_mw", clean(m.magnitude)}, {"time_h", clean(m.time)}};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, clean(v));
  return std::string(buf, p);
}

json plan_to_json(const CaseModel& c, const Plan& plan) {
  json theta = json::object();
  for (std::size_t k = 0; k < plan.theta.size(); ++k) theta[c.substations[k].id] = plan.theta[k];
  json tau = json::object();
  for (const auto& s : c.substations) tau[s.id] = protection_time(s.mean_flood_depth, c.crew.members_per_team);
  json grid = json::array();
  for (const auto& row : schedule_grid(c, plan)) grid.push_back(row);
  json blocks = json::array();
  for (std::size_t n = 0; n < plan.work.size(); ++n) {
    for (std::size_t k = 0; k < plan.work[n].size(); ++k) {
      const auto& h = plan.work[n][k];
      for (std::size_t t = 0; t < h.size(); ++t) {
        if (!h[t] || (t > 0 && h[t - 1])) continue;
        std::size_t end = t;
        while (end + 1 < h.size() && h[end + 1]) ++end;
        blocks.push_back({{"team", n + 1}, {"substation", c.substations[k].id}, {"first_hour", t + 1},
                          {"last_hour", end + 1}});
      }
    }
  }
  return {{"protected", plan.protected_set(c)},
          {"theta", theta},
          {"protection_hours", tau},
          {"schedule", {{"teams", c.crew.num_teams}, {"hours", c.crew.prep_hours}, {"grid", grid}, {"blocks", blocks}}}};
}

json report_to_json(const PlanReport& r) {
  json scenarios = json::array();
  for (const auto& d : r.scenarios)
    scenarios.push_back({{"id", d.id},
                         {"probability", clean(d.probability)},
                         {"substation_cost", clean(d.substation_cost)},
                         {"lost_load_cost", clean(d.lost_load_cost)},
                         {"shed_energy_mwh", clean(d.shed_energy)},
                         {"outage", outage_json(d.outage)}});
  return {{"protected", r.protected_set},
          {"schedule", r.schedule},
          {"expected_cost", clean(r.expected_cost)},
          {"substation_cost", clean(r.substation_cost)},
          {"lost_load_cost", clean(r.lost_load_cost)},
          {"outage", outage_json(r.outage)},
          {"metric_definitions",
           {{"outage_magnitude", "peak MW shed after flood onset"},
            {"outage_time", "hours with more than 1e-6 MW shed"},
            {"repair_times", "ceiled to whole hours"},
            {"expected", "probability-weighted over the scenario set"}}},
          {"scenarios", scenarios}};
}

json comparison_to_json(const Comparison& cmp, const std::string& a_label, const std::string& b_label) {
  return {{"plans", {{a_label, report_to_json(cmp.a)}, {b_label, report_to_json(cmp.b)}}},
          {"delta", {{"definition", a_label + " minus " + b_label + "; percent relative to " + b_label},
                     {"expected_cost", delta_json(cmp.expected_cost)},
                     {"substation_cost", delta_json(cmp.substation_cost)},
                     {"lost_load_cost", delta_json(cmp.lost_load_cost)},
                     {"outage_magnitude", delta_json(cmp.outage_magnitude)},
                     {"outage_time", delta_json(cmp.outage_time)}}}};
}

json sensitivity_to_json(const SensitivityNote& note) {
  json entries = json::array();
  for (const auto& e : note.entries)
    entries.push_back({{"parameter", e.parameter},
                       {"factor", e.factor},
                       {"status", e.status},
                       {"protected", e.protected_set},
                       {"changed", e.changed}});
  return {{"base_protected", note.base_set}, {"changing_parameters", note.changing_parameters}, {"entries", entries}};
}

std::string curve_to_csv(const ResilienceCurve& curve) {
  std::string out = "scenario_id,hour,demand_mw,served_mw,served_pct\n";
  auto row = [&](const std::string& id, const CurveSample& s) {
    const double pct = s.demand > 0.0 ? 100.0 * s.served / s.demand : 100.0;
    out += id + "," + std::to_string(s.hour) + "," + format_double(s.demand) + "," + format_double(s.served) + "," +
           format_double(pct) + "\n";
  };
  for (const auto& sc : curve.scenarios)
    for (const auto& s : sc.samples) row(sc.scenario_id, s);
  for (const auto& s : curve.expected) row("expected", s);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace floodguard
