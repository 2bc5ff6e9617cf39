#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <ostream>
#include <string>
#include <vector>

#include "floodguard/lp.hpp"
#include "floodguard/model.hpp"

namespace floodguard {

enum class MipStatus { Optimal, Infeasible, NodeLimit, Unbounded, NumericalFailure };

const char* to_string(MipStatus s);

struct NodeRecord {
  long id = 0;
  long parent = -1;
  int depth = 0;
  double lp_objective = 0.0;
  double parent_objective = -kInf;
  double bound = -kInf;      // global lower bound when the node was processed
  double incumbent = kInf;   // best objective known after processing
  bool integral = false;
  bool infeasible = false;
};

struct MipOptions {
  long node_limit = 200000;
  double gap_tolerance = 1e-6;
  double integrality_tolerance = 1e-6;
  // A diving heuristic runs at the root and on every `dive_interval`-th node
  // until an incumbent exists, then every `dive_interval` nodes. 0 disables.
  int dive_interval = 0;
  long dive_budget = 200;  // LP solves per dive, backtracking included
  SimplexOptions lp;
  std::ostream* log = nullptr;                         // one line per node
  std::function<void(const NodeRecord&)> on_node;      // structured node log
};

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  bool has_incumbent = false;
  double objective = kInf;
  std::vector<double> x;  // binaries rounded to exact 0/1
  double bound = -kInf;
  long nodes = 0;
  long lp_iterations = 0;
  double gap = kInf;  // (incumbent - bound) / max(1, |incumbent|)
};

// Best-bound branch-and-bound over the binaries of `instance`. Branching
// picks the most fractional binary, preferring protection and crew
// variables over availability indicators; ties go to the lowest catalog
// index. Open nodes with equal bounds are taken in insertion order.
MipResult solve_mip(const MilpInstance& instance, const MipOptions& options = {});

double relative_gap(double incumbent, double bound);

struct WarmStartReport {
  bool feasible = false;
  double objective = kInf;
  LpStatus lp_status = LpStatus::Infeasible;
  std::vector<std::string> violated_families;  // sorted, unique
  std::vector<double> x;
  std::string message;
};

class IncompleteAssignment : public std::invalid_argument {
 public:
  IncompleteAssignment(const std::string& what, std::vector<std::string> missing_names)
      : std::invalid_argument(what), missing(std::move(missing_names)) {}
  std::vector<std::string> missing;
};

// Fixes every binary to the given value (by variable name), then solves the
// continuous LP. Violations are attributed to constraint families: rows over
// binaries only are checked directly, and when the LP is infeasible each
// remaining family is dropped in turn to find the ones whose removal
// restores feasibility. Throws IncompleteAssignment when binaries are missing.
WarmStartReport warm_start_check(const MilpInstance& instance, const std::map<std::string, double>& assignment);

}  // namespace floodguard
