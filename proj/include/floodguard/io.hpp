#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "floodguard/domain.hpp"
#include "floodguard/eval.hpp"
#include "floodguard/model.hpp"
#include "floodguard/scenario.hpp"

namespace floodguard {

// Malformed document: unparsable text, missing key, or wrong value type.
// Value-range problems are left to validate_case.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CaseModel case_from_json(const nlohmann::json& j);
nlohmann::json case_to_json(const CaseModel& c);
CaseModel load_case(const std::filesystem::path& path);

// Scenario files hold {"scenarios": [{id, failed: {sub: 0|1}, probability}]}.
// Given probabilities are taken as raw values; the set is renormalized and a
// warning appended when they do not sum to one within 1e-6.
ScenarioSet scenarios_from_json(const nlohmann::json& j, const std::vector<Substation>& subs,
                                std::vector<std::string>* warnings = nullptr);
nlohmann::json scenarios_to_json(const ScenarioSet& set);
ScenarioSet load_scenarios(const std::filesystem::path& path, const std::vector<Substation>& subs,
                           std::vector<std::string>* warnings = nullptr);

// Debug dump: variables with kind/bounds/role, constraints with family tags.
nlohmann::json catalog_dump(const MilpInstance& inst);

// Report serialization. Doubles are written in shortest round-trip form.
nlohmann::json plan_to_json(const CaseModel& c, const Plan& plan);
nlohmann::json report_to_json(const PlanReport& report);
nlohmann::json comparison_to_json(const Comparison& cmp, const std::string& a_label, const std::string& b_label);
nlohmann::json sensitivity_to_json(const SensitivityNote& note);
// Columns scenario_id, hour, demand_mw, served_mw, served_pct; the
// probability-weighted curve uses scenario_id "expected".
std::string curve_to_csv(const ResilienceCurve& curve);
std::string format_double(double v);

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace floodguard
