#pragma once

#include <iosfwd>
#include <string>

#include "floodguard/domain.hpp"
#include "floodguard/scenario.hpp"

namespace floodguard {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResourceLimit = 3;
inline constexpr int kExitInfeasible = 4;

// Scenario source spec: "file:PATH", "nested:d1,d2,..." or "top:N". An empty
// spec uses the case's scenario_thresholds, or top:4 when it has none.
ScenarioSet scenarios_from_spec(const CaseModel& c, const std::string& spec, std::vector<std::string>* warnings);

// Entry point of the floodguard command line. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace floodguard
