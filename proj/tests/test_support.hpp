#pragma once

// Helpers shared by the test binaries: small dense model construction and
// brute-force oracles that do not touch the simplex code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "floodguard/lp.hpp"
#include "floodguard/model.hpp"

namespace floodguard::testing {

struct DenseLp {
  std::vector<double> cost;
  std::vector<std::vector<double>> rows;  // each row: a_i
  std::vector<Sense> senses;
  std::vector<double> rhs;
  std::vector<double> lower, upper;
  std::vector<bool> binary;
};

inline MilpInstance to_instance(const DenseLp& lp) {
  MilpInstance inst;
  const std::size_t n = lp.cost.size();
  for (std::size_t j = 0; j < n; ++j) {
    Variable v;
    v.name = "v" + std::to_string(j);
    v.kind = (!lp.binary.empty() && lp.binary[j]) ? VarKind::Binary : VarKind::Continuous;
    v.lower = lp.lower[j];
    v.upper = lp.upper[j];
    inst.catalog.add(v);
    if (lp.cost[j] != 0.0) inst.objective.push_back({static_cast<int>(j), lp.cost[j]});
  }
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    LinearConstraint c;
    for (std::size_t j = 0; j < n; ++j)
      if (lp.rows[i][j] != 0.0) c.terms.push_back({static_cast<int>(j), lp.rows[i][j]});
    c.sense = lp.senses[i];
    c.rhs = lp.rhs[i];
    inst.constraints.push_back(c);
  }
  return inst;
}

// Solves the square system M y = r by Gaussian elimination with partial
// pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_dense(std::vector<std::vector<double>> M,
                                                      std::vector<double> r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(M[i][c]) > std::abs(M[piv][c])) piv = i;
    if (std::abs(M[piv][c]) < 1e-10) return std::nullopt;
    std::swap(M[piv], M[c]);
    std::swap(r[piv], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = M[i][c] / M[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) M[i][k] -= f * M[c][k];
      r[i] -= f * r[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) r[i] /= M[i][i];
  return r;
}

// Minimum over all vertices of a box-bounded LP: every choice of n active
// hyperplanes among rows and bounds. Returns nullopt when infeasible.
inline std::optional<double> vertex_enumeration_optimum(const DenseLp& lp, double tol = 1e-7) {
  const std::size_t n = lp.cost.size();
  std::vector<std::vector<double>> planes;
  std::vector<double> level;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    planes.push_back(lp.rows[i]);
    level.push_back(lp.rhs[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.push_back(e);
    level.push_back(lp.lower[j]);
    planes.push_back(e);
    level.push_back(lp.upper[j]);
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] < lp.lower[j] - tol || x[j] > lp.upper[j] + tol) return false;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
      double a = 0.0;
      for (std::size_t j = 0; j < n; ++j) a += lp.rows[i][j] * x[j];
      if (lp.senses[i] == Sense::LessEqual && a > lp.rhs[i] + tol) return false;
      if (lp.senses[i] == Sense::GreaterEqual && a < lp.rhs[i] - tol) return false;
      if (lp.senses[i] == Sense::Equal && std::abs(a - lp.rhs[i]) > tol) return false;
    }
    return true;
  };
  std::optional<double> best;
  const std::size_t P = planes.size();
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  if (n == 0) return 0.0;
  while (true) {
    std::vector<std::vector<double>> M;
    std::vector<double> r;
    for (auto p : pick) {
      M.push_back(planes[p]);
      r.push_back(level[p]);
    }
    if (auto x = solve_dense(M, r); x && feasible(*x)) {
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += lp.cost[j] * (*x)[j];
      if (!best || obj < *best) best = obj;
    }
    // next combination
    std::size_t k = n;
    while (k > 0 && pick[k - 1] == P - n + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t i = k; i < n; ++i) pick[i] = pick[i - 1] + 1;
  }
  return best;
}

inline DenseLp random_lp(std::mt19937& rng, std::size_t vars, std::size_t rows,
                         std::size_t binaries = 0) {
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> sense(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseLp lp;
  lp.cost.resize(vars);
  lp.lower.resize(vars);
  lp.upper.resize(vars);
  lp.binary.assign(vars, false);
  for (std::size_t j = 0; j < vars; ++j) {
    lp.cost[j] = coef(rng);
    if (j < binaries) {
      lp.binary[j] = true;
      lp.lower[j] = 0.0;
      lp.upper[j] = 1.0;
    } else {
      lp.lower[j] = -std::floor(unit(rng) * 4.0);
      lp.upper[j] = lp.lower[j] + 1.0 + std::floor(unit(rng) * 6.0);
    }
  }
  // A reference point inside the box keeps most instances feasible.
  std::vector<double> ref(vars);
  for (std::size_t j = 0; j < vars; ++j)
    ref[j] = lp.binary[j] ? std::round(unit(rng)) : lp.lower[j] + unit(rng) * (lp.upper[j] - lp.lower[j]);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> a(vars);
    double act = 0.0;
    for (std::size_t j = 0; j < vars; ++j) {
      a[j] = unit(rng) < 0.6 ? coef(rng) : 0.0;
      act += a[j] * ref[j];
    }
    const int s = sense(rng);
    lp.rows.push_back(a);
    if (s == 0) {
      lp.senses.push_back(Sense::LessEqual);
      lp.rhs.push_back(std::round(act + unit(rng) * 3.0 - 1.0));
    } else if (s == 1) {
      lp.senses.push_back(Sense::GreaterEqual);
      lp.rhs.push_back(std::round(act - unit(rng) * 3.0 + 1.0));
    } else {
      lp.senses.push_back(Sense::LessEqual);
      lp.rhs.push_back(std::round(act + unit(rng) * 2.0));
    }
  }
  return lp;
}

// LP over the continuous columns only, with the binaries fixed by `mask`
// moved to the right-hand side.
inline DenseLp fix_binaries(const DenseLp& lp, const std::vector<std::size_t>& bins, unsigned mask, double* constant) {
  std::vector<double> value(lp.cost.size(), 0.0);
  std::vector<bool> is_bin(lp.cost.size(), false);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    value[bins[b]] = (mask >> b) & 1u;
    is_bin[bins[b]] = true;
  }
  DenseLp out;
  out.senses = lp.senses;
  *constant = 0.0;
  for (std::size_t j = 0; j < lp.cost.size(); ++j) {
    if (is_bin[j]) {
      *constant += lp.cost[j] * value[j];
      continue;
    }
    out.cost.push_back(lp.cost[j]);
    out.lower.push_back(lp.lower[j]);
    out.upper.push_back(lp.upper[j]);
  }
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    std::vector<double> row;
    double rhs = lp.rhs[i];
    for (std::size_t j = 0; j < lp.cost.size(); ++j) {
      if (is_bin[j]) rhs -= lp.rows[i][j] * value[j];
      else row.push_back(lp.rows[i][j]);
    }
    out.rows.push_back(row);
    out.rhs.push_back(rhs);
  }
  return out;
}

inline bool rows_hold(const DenseLp& lp) {
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.senses[i] == Sense::LessEqual && 0.0 > lp.rhs[i] + 1e-9) return false;
    if (lp.senses[i] == Sense::GreaterEqual && 0.0 < lp.rhs[i] - 1e-9) return false;
    if (lp.senses[i] == Sense::Equal && std::abs(lp.rhs[i]) > 1e-9) return false;
  }
  return true;
}

// Minimum over every binary assignment of the LP in the remaining columns.
// Small remainders use vertex enumeration, larger ones the simplex.
inline std::optional<double> brute_force_milp(const DenseLp& lp) {
  std::vector<std::size_t> bins;
  for (std::size_t j = 0; j < lp.binary.size(); ++j)
    if (lp.binary[j]) bins.push_back(j);
  std::optional<double> best;
  for (unsigned mask = 0; mask < (1u << bins.size()); ++mask) {
    double constant = 0.0;
    const DenseLp rest = fix_binaries(lp, bins, mask, &constant);
    std::optional<double> v;
    if (rest.cost.empty()) {
      if (rows_hold(rest)) v = 0.0;
    } else if (rest.cost.size() <= 4 && rest.rows.size() <= 8) {
      v = vertex_enumeration_optimum(rest);
    } else {
      const auto r = solve_lp(to_instance(rest));
      if (r.status == LpStatus::Optimal) v = r.objective;
    }
    if (v && (!best || *v + constant < *best)) best = *v + constant;
  }
  return best;
}

}  // namespace floodguard::testing
