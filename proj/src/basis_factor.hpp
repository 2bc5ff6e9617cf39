#pragma once

#include <utility>
#include <vector>

namespace floodguard::detail {

// Sparse LU of a square simplex basis by right-looking Markowitz elimination
// with threshold pivoting. Columns are indexed by basis position, rows by
// constraint row. Product-form eta updates sit on top of the factor.
class BasisFactor {
 public:
  using Column = std::vector<std::pair<int, double>>;

  // Factors the m x m matrix given in compressed column form (start has m+1
  // entries). Singletons are eliminated first; the remaining bump goes
  // through Markowitz elimination. Returns false when the matrix is
  // structurally or numerically singular; `singular_positions` and
  // `unpivoted_rows` then list matching basis positions and rows that a
  // caller can cover with unit columns before refactoring.
  bool factor(int m, const std::vector<int>& start, const std::vector<int>& index,
              const std::vector<double>& value);

  // Solves B x = b in place (b indexed by row, x by basis position).
  void ftran(std::vector<double>& v) const;
  // Solves B^T y = c in place (c indexed by basis position, y by row).
  void btran(std::vector<double>& v) const;

  // Records the replacement of basis position r by a column whose FTRAN
  // image is `alpha`.
  void update(int r, const std::vector<double>& alpha);
  int num_updates() const { return static_cast<int>(etas_.size()); }

  std::vector<int> singular_positions;
  std::vector<int> unpivoted_rows;

 private:
  struct Eta {
    int pos = 0;
    double pivot = 1.0;
    std::vector<std::pair<int, double>> entries;
  };

  int m_ = 0;
  std::vector<int> prow_, pcol_;  // pivot k: row prow_[k], basis position pcol_[k]
  std::vector<double> diag_;
  std::vector<int> l_start_, l_index_;  // multipliers of pivot k, by row
  std::vector<double> l_value_;
  std::vector<int> ucol_start_, ucol_index_;  // column of pivot k: earlier pivots
  std::vector<double> ucol_value_;
  std::vector<int> urow_start_, urow_index_;  // row of pivot k: later pivots
  std::vector<double> urow_value_;
  std::vector<Eta> etas_;
  mutable std::vector<double> scratch_;
};

}  // namespace floodguard::detail
