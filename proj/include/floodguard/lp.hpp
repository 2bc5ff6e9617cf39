#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "floodguard/model.hpp"

namespace floodguard {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Row-ranged, column-bounded LP in compressed-column form:
//   min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
struct LpProblem {
  int num_cols = 0;
  int num_rows = 0;
  std::vector<double> cost;
  std::vector<double> col_lower, col_upper;
  std::vector<double> row_lower, row_upper;
  std::vector<int> col_start;  // size num_cols + 1
  std::vector<int> row_index;
  std::vector<double> value;

  static LpProblem from_instance(const MilpInstance& instance);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure, IterationLimit };

const char* to_string(LpStatus s);

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Fixed, Free };

// Status of every structural column followed by every row logical.
struct Basis {
  std::vector<VarStatus> status;
  bool empty() const { return status.empty(); }
};

struct SimplexOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-10;
  long iteration_limit = 1'000'000;
  int refactor_interval = 100;
  // Substitute bound for infinite column bounds; a solution resting on it is
  // reported as unbounded.
  double artificial_bound = 1e9;
};

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> row_activity;
  long iterations = 0;
  Basis basis;
};

// Bounded dual simplex. The object keeps the constraint matrix and can be
// re-solved with different column bounds from a previous basis, which is
// how branch-and-bound nodes are warm-started.
class DualSimplex {
 public:
  explicit DualSimplex(LpProblem problem, SimplexOptions options = {});
  ~DualSimplex();
  DualSimplex(DualSimplex&&) noexcept;
  DualSimplex& operator=(DualSimplex&&) noexcept;

  const LpProblem& problem() const;
  void set_col_bounds(int col, double lower, double upper);
  void set_col_bounds(const std::vector<double>& lower, const std::vector<double>& upper);
  void set_row_bounds(int row, double lower, double upper);

  // Solves from `warm` when given and usable, otherwise from the slack basis.
  LpResult solve(const Basis* warm = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LpResult solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

// LP relaxation of an instance (binaries relaxed to [0,1]).
LpResult solve_lp(const MilpInstance& instance, const SimplexOptions& options = {});

}  // namespace floodguard
