#include "floodguard/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "basis_factor.hpp"

namespace floodguard {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalFailure: return "numerical-failure";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

LpProblem LpProblem::from_instance(const MilpInstance& instance) {
  LpProblem lp;
  const auto& cat = instance.catalog;
  lp.num_cols = static_cast<int>(cat.size());
  lp.num_rows = static_cast<int>(instance.constraints.size());
  lp.cost.assign(lp.num_cols, 0.0);
  for (const auto& t : instance.objective) lp.cost[t.var] += t.coef;
  lp.col_lower.resize(lp.num_cols);
  lp.col_upper.resize(lp.num_cols);
  for (int j = 0; j < lp.num_cols; ++j) {
    lp.col_lower[j] = cat[j].lower;
    lp.col_upper[j] = cat[j].upper;
  }
  lp.row_lower.resize(lp.num_rows);
  lp.row_upper.resize(lp.num_rows);
  std::vector<int> count(lp.num_cols + 1, 0);
  for (int i = 0; i < lp.num_rows; ++i) {
    const auto& c = instance.constraints[i];
    lp.row_lower[i] = c.sense == Sense::LessEqual ? -kInf : c.rhs;
    lp.row_upper[i] = c.sense == Sense::GreaterEqual ? kInf : c.rhs;
    for (const auto& t : c.terms) ++count[t.var + 1];
  }
  lp.col_start.assign(lp.num_cols + 1, 0);
  for (int j = 0; j < lp.num_cols; ++j) lp.col_start[j + 1] = lp.col_start[j] + count[j + 1];
  lp.row_index.resize(lp.col_start.back());
  lp.value.resize(lp.col_start.back());
  std::vector<int> fill(lp.col_start.begin(), lp.col_start.end() - 1);
  for (int i = 0; i < lp.num_rows; ++i) {
    for (const auto& t : instance.constraints[i].terms) {
      const int at = fill[t.var]++;
      lp.row_index[at] = i;
      lp.value[at] = t.coef;
    }
  }
  return lp;
}

namespace {

enum class Phase { Running, Optimal, Infeasible, Numerical, IterationLimit };

}  // namespace

struct DualSimplex::Impl {
  LpProblem prob;
  SimplexOptions opt;
  int n = 0;
  int m = 0;

  // Row-wise copy of A.
  std::vector<int> row_start, row_col;
  std::vector<double> row_val;

  // Working data over n structurals + m logicals. Logical n+i has column -e_i.
  std::vector<double> lb, ub, cost;
  std::vector<char> artificial;
  std::vector<VarStatus> status;
  std::vector<int> head;
  std::vector<int> position;
  std::vector<double> x, d;

  detail::BasisFactor factor;
  bool factor_valid = false;
  std::vector<int> bstart, bindex;
  std::vector<double> bvalue;
  std::vector<double> weight;  // dual Devex reference weights by basis position
  long iterations = 0;

  // scratch
  std::vector<double> work, rho, alpha_row;
  std::vector<int> alpha_touched;
  std::vector<char> alpha_mark;

  Impl(LpProblem p, SimplexOptions o) : prob(std::move(p)), opt(o) {
    n = prob.num_cols;
    m = prob.num_rows;
    if (static_cast<int>(prob.col_start.size()) != n + 1)
      throw std::invalid_argument("LpProblem: col_start has wrong size");
    row_start.assign(m + 1, 0);
    for (int k = 0; k < prob.col_start[n]; ++k) ++row_start[prob.row_index[k] + 1];
    for (int i = 0; i < m; ++i) row_start[i + 1] += row_start[i];
    row_col.resize(prob.col_start[n]);
    row_val.resize(prob.col_start[n]);
    std::vector<int> fill(row_start.begin(), row_start.end() - 1);
    for (int j = 0; j < n; ++j) {
      for (int k = prob.col_start[j]; k < prob.col_start[j + 1]; ++k) {
        const int at = fill[prob.row_index[k]]++;
        row_col[at] = j;
        row_val[at] = prob.value[k];
      }
    }
    cost.assign(n + m, 0.0);
    std::copy(prob.cost.begin(), prob.cost.end(), cost.begin());
    lb.resize(n + m);
    ub.resize(n + m);
    artificial.assign(n + m, 0);
    load_bounds();
    work.resize(m);
    rho.resize(m);
    alpha_row.assign(n + m, 0.0);
    alpha_mark.assign(n + m, 0);
  }

  void load_bounds() {
    for (int j = 0; j < n; ++j) {
      lb[j] = prob.col_lower[j];
      ub[j] = prob.col_upper[j];
      artificial[j] = 0;
      if (!std::isfinite(lb[j])) {
        lb[j] = -opt.artificial_bound;
        artificial[j] = 1;
      }
      if (!std::isfinite(ub[j])) {
        ub[j] = opt.artificial_bound;
        artificial[j] = 1;
      }
    }
    for (int i = 0; i < m; ++i) {
      lb[n + i] = prob.row_lower[i];
      ub[n + i] = prob.row_upper[i];
    }
  }

  bool boxed(int j) const { return std::isfinite(lb[j]) && std::isfinite(ub[j]); }

  template <typename F>
  void for_column(int j, F&& f) const {
    if (j < n) {
      for (int k = prob.col_start[j]; k < prob.col_start[j + 1]; ++k) f(prob.row_index[k], prob.value[k]);
    } else {
      f(j - n, -1.0);
    }
  }

  double nonbasic_value(int j) const {
    switch (status[j]) {
      case VarStatus::AtLower: return lb[j];
      case VarStatus::AtUpper: return ub[j];
      case VarStatus::Fixed: return lb[j];
      default: return 0.0;
    }
  }

  // Status a nonbasic variable should take given its reduced cost sign.
  VarStatus resting_status(int j, double dj) const {
    if (lb[j] == ub[j]) return VarStatus::Fixed;
    const bool has_lo = std::isfinite(lb[j]);
    const bool has_up = std::isfinite(ub[j]);
    if (has_lo && has_up) return dj >= 0.0 ? VarStatus::AtLower : VarStatus::AtUpper;
    if (has_lo) return VarStatus::AtLower;
    if (has_up) return VarStatus::AtUpper;
    return VarStatus::Free;
  }

  // Factors the current basis. Singular columns are swapped for the
  // logicals of uncovered rows.
  bool refactor() {
    factor_valid = refactor_once();
    return factor_valid;
  }

  bool refactor_once() {
    if (m == 0) return true;
    for (int attempt = 0; attempt < 3; ++attempt) {
      bstart.assign(1, 0);
      bindex.clear();
      bvalue.clear();
      for (int r = 0; r < m; ++r) {
        for_column(head[r], [&](int i, double v) {
          bindex.push_back(i);
          bvalue.push_back(v);
        });
        bstart.push_back(static_cast<int>(bindex.size()));
      }
      if (factor.factor(m, bstart, bindex, bvalue)) return true;
      const auto& sing = factor.singular_positions;
      const auto& rows = factor.unpivoted_rows;
      if (sing.size() != rows.size()) return false;
      for (std::size_t k = 0; k < sing.size(); ++k) {
        const int r = sing[k];
        const int out = head[r];
        const int in = n + rows[k];
        status[out] = resting_status(out, cost[out]);
        position[out] = -1;
        head[r] = in;
        position[in] = r;
        status[in] = VarStatus::Basic;
      }
    }
    return false;
  }

  void ftran(std::vector<double>& v) { factor.ftran(v); }
  void btran(std::vector<double>& v) { factor.btran(v); }

  void compute_primal() {
    std::fill(work.begin(), work.end(), 0.0);
    for (int j = 0; j < n + m; ++j) {
      if (status[j] == VarStatus::Basic) continue;
      x[j] = nonbasic_value(j);
      if (x[j] != 0.0) {
        const double xj = x[j];
        for_column(j, [&](int i, double v) { work[i] -= v * xj; });
      }
    }
    ftran(work);
    for (int r = 0; r < m; ++r) x[head[r]] = work[r];
  }

  void compute_dual() {
    for (int r = 0; r < m; ++r) rho[r] = cost[head[r]];
    btran(rho);
    for (int j = 0; j < n + m; ++j) {
      if (status[j] == VarStatus::Basic) {
        d[j] = 0.0;
        continue;
      }
      double dj = cost[j];
      for_column(j, [&](int i, double v) { dj -= rho[i] * v; });
      d[j] = dj;
    }
  }

  void slack_basis() {
    status.assign(n + m, VarStatus::Basic);
    head.resize(m);
    position.assign(n + m, -1);
    for (int j = 0; j < n; ++j) status[j] = resting_status(j, cost[j]);
    for (int i = 0; i < m; ++i) {
      head[i] = n + i;
      position[n + i] = i;
    }
  }

  // Nonbasic statuses consistent with the current bounds.
  void normalize_nonbasic() {
    for (int j = 0; j < n + m; ++j) {
      if (status[j] == VarStatus::Basic) continue;
      if (lb[j] == ub[j]) {
        status[j] = VarStatus::Fixed;
      } else if (status[j] == VarStatus::Fixed) {
        status[j] = resting_status(j, cost[j]);
      } else if (status[j] == VarStatus::AtLower && !std::isfinite(lb[j])) {
        status[j] = std::isfinite(ub[j]) ? VarStatus::AtUpper : VarStatus::Free;
      } else if (status[j] == VarStatus::AtUpper && !std::isfinite(ub[j])) {
        status[j] = std::isfinite(lb[j]) ? VarStatus::AtLower : VarStatus::Free;
      }
    }
  }

  // True when `basis` has the same basic set as the factored one, so only
  // nonbasic statuses need to be taken over.
  bool same_basic_set(const Basis& basis) const {
    if (!factor_valid || static_cast<int>(basis.status.size()) != n + m ||
        static_cast<int>(status.size()) != n + m)
      return false;
    for (int j = 0; j < n + m; ++j)
      if ((basis.status[j] == VarStatus::Basic) != (status[j] == VarStatus::Basic)) return false;
    return true;
  }

  bool load_basis(const Basis& basis) {
    if (static_cast<int>(basis.status.size()) != n + m) return false;
    status = basis.status;
    head.clear();
    position.assign(n + m, -1);
    for (int j = 0; j < n + m; ++j) {
      if (status[j] == VarStatus::Basic) {
        position[j] = static_cast<int>(head.size());
        head.push_back(j);
      }
    }
    if (static_cast<int>(head.size()) != m) return false;
    normalize_nonbasic();
    return true;
  }

  // Flips boxed nonbasic variables whose reduced cost has the wrong sign.
  // Returns false when a non-boxed variable is dual infeasible.
  bool repair_dual(double tol) {
    bool ok = true;
    bool flipped = false;
    for (int j = 0; j < n + m; ++j) {
      const VarStatus s = status[j];
      if (s == VarStatus::Basic || s == VarStatus::Fixed) continue;
      const bool wrong = (s == VarStatus::AtLower && d[j] < -tol) ||
                         (s == VarStatus::AtUpper && d[j] > tol) ||
                         (s == VarStatus::Free && std::abs(d[j]) > tol);
      if (!wrong) continue;
      if (boxed(j)) {
        status[j] = s == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
        flipped = true;
      } else {
        ok = false;
      }
    }
    if (flipped) compute_primal();
    return ok;
  }

  bool primal_feasible() const {
    for (int r = 0; r < m; ++r)
      if (infeasibility(head[r]) > 0.0) return false;
    return true;
  }

  double infeasibility(int j) const {
    if (x[j] < lb[j] - opt.primal_tolerance) return lb[j] - x[j];
    if (x[j] > ub[j] + opt.primal_tolerance) return x[j] - ub[j];
    return 0.0;
  }

  void compute_pivot_row(int r) {
    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    btran(rho);
    for (int j : alpha_touched) {
      alpha_row[j] = 0.0;
      alpha_mark[j] = 0;
    }
    alpha_touched.clear();
    auto touch = [&](int j) {
      if (!alpha_mark[j]) {
        alpha_mark[j] = 1;
        alpha_touched.push_back(j);
      }
    };
    for (int i = 0; i < m; ++i) {
      const double ri = rho[i];
      if (std::abs(ri) < 1e-14) continue;
      for (int k = row_start[i]; k < row_start[i + 1]; ++k) {
        const int j = row_col[k];
        if (status[j] == VarStatus::Basic) continue;
        touch(j);
        alpha_row[j] += ri * row_val[k];
      }
      const int logical = n + i;
      if (status[logical] != VarStatus::Basic) {
        touch(logical);
        alpha_row[logical] -= ri;
      }
    }
  }

  void pivot(int r, int q, std::vector<double>& column, VarStatus leaving_status) {
    const int p = head[r];
    factor.update(r, column);
    head[r] = q;
    position[q] = r;
    position[p] = -1;
    status[q] = VarStatus::Basic;
    status[p] = leaving_status;
    d[q] = 0.0;
  }

  Phase dual_phase(bool& bland) {
    const long stall_limit = 3L * (n + m);
    long since_improvement = 0;
    double best_objective = -kInf;
    double objective = 0.0;
    for (int j = 0; j < n + m; ++j) objective += cost[j] * x[j];
    int numerical_retries = 0;
    std::vector<double> column(m);

    while (true) {
      if (iterations >= opt.iteration_limit) return Phase::IterationLimit;
      if (factor.num_updates() >= opt.refactor_interval) {
        if (!refactor()) return Phase::Numerical;
        compute_primal();
        compute_dual();
        repair_dual(opt.dual_tolerance);
      }

      // Leaving row: largest weighted infeasibility, or lowest variable index
      // under Bland.
      int r = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        const double inf = infeasibility(head[i]);
        if (inf <= 0.0) continue;
        if (bland) {
          if (r < 0 || head[i] < head[r]) r = i;
        } else if (inf * inf > best * weight[i]) {
          best = inf * inf / weight[i];
          r = i;
        }
      }
      if (r < 0) return Phase::Optimal;

      const int p = head[r];
      const bool below = x[p] < lb[p];
      const double target = below ? lb[p] : ub[p];
      const double delta = x[p] - target;
      const double sgn = below ? -1.0 : 1.0;

      compute_pivot_row(r);

      // Harris two-pass ratio test.
      auto eligible = [&](int j, double a) {
        if (std::abs(a) <= opt.pivot_tolerance) return false;
        switch (status[j]) {
          case VarStatus::AtLower: return sgn * a > 0.0;
          case VarStatus::AtUpper: return sgn * a < 0.0;
          case VarStatus::Free: return true;
          default: return false;
        }
      };
      auto signed_d = [&](int j) {
        if (status[j] == VarStatus::AtLower) return d[j];
        if (status[j] == VarStatus::AtUpper) return -d[j];
        return std::abs(d[j]);
      };
      int q = -1;
      if (bland) {
        double best_ratio = kInf;
        for (int j : alpha_touched) {
          const double a = alpha_row[j];
          if (!eligible(j, a)) continue;
          const double ratio = std::max(signed_d(j), 0.0) / std::abs(a);
          if (q < 0 || ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && j < q)) {
            best_ratio = std::min(best_ratio, ratio);
            q = j;
          }
        }
      } else {
        double bound = kInf;
        for (int j : alpha_touched) {
          const double a = alpha_row[j];
          if (!eligible(j, a)) continue;
          bound = std::min(bound, (std::max(signed_d(j), 0.0) + opt.dual_tolerance) / std::abs(a));
        }
        double best_alpha = 0.0;
        for (int j : alpha_touched) {
          const double a = alpha_row[j];
          if (!eligible(j, a)) continue;
          if (std::max(signed_d(j), 0.0) / std::abs(a) <= bound && std::abs(a) > best_alpha) {
            best_alpha = std::abs(a);
            q = j;
          }
        }
      }
      if (q < 0) {
        // Confirm on a fresh factorization before declaring infeasibility.
        if (factor.num_updates() > 0) {
          if (!refactor()) return Phase::Numerical;
          compute_primal();
          compute_dual();
          repair_dual(opt.dual_tolerance);
          continue;
        }
        return Phase::Infeasible;
      }

      std::fill(column.begin(), column.end(), 0.0);
      for_column(q, [&](int i, double v) { column[i] = v; });
      ftran(column);
      const double alpha_q = column[r];
      const double alpha_rq = alpha_row[q];
      if (std::abs(alpha_q) < opt.pivot_tolerance ||
          std::abs(alpha_q - alpha_rq) > 1e-7 * (1.0 + std::abs(alpha_q))) {
        if (++numerical_retries > 5) return Phase::Numerical;
        if (!refactor()) return Phase::Numerical;
        compute_primal();
        compute_dual();
        repair_dual(opt.dual_tolerance);
        continue;
      }
      numerical_retries = 0;

      const double wr = weight[r];
      for (int i = 0; i < m; ++i) {
        if (i == r || column[i] == 0.0) continue;
        const double ratio = column[i] / alpha_q;
        weight[i] = std::max(weight[i], ratio * ratio * wr);
      }
      weight[r] = std::max(wr / (alpha_q * alpha_q), 1.0);

      const double theta_d = sgn * std::max(signed_d(q), 0.0) / std::abs(alpha_rq);
      for (int j : alpha_touched) {
        if (status[j] == VarStatus::Basic || status[j] == VarStatus::Fixed) continue;
        d[j] -= theta_d * alpha_row[j];
      }
      d[p] = -theta_d;

      const double theta_p = delta / alpha_q;
      for (int i = 0; i < m; ++i)
        if (column[i] != 0.0) x[head[i]] -= theta_p * column[i];
      x[q] += theta_p;
      x[p] = target;

      VarStatus leaving = lb[p] == ub[p] ? VarStatus::Fixed
                          : below        ? VarStatus::AtLower
                                         : VarStatus::AtUpper;
      pivot(r, q, column, leaving);
      ++iterations;

      objective += theta_d * delta;
      if (objective > best_objective + 1e-12 * (1.0 + std::abs(objective))) {
        best_objective = objective;
        since_improvement = 0;
      } else if (++since_improvement > stall_limit) {
        bland = true;
      }
    }
  }

  // Primal simplex from a primal feasible basis; removes residual dual
  // infeasibilities left by the dual phase.
  Phase primal_cleanup() {
    std::vector<double> column(m);
    int numerical_retries = 0;
    long stall = 0;
    bool bland = false;
    const long stall_limit = 3L * (n + m);
    double objective = 0.0;
    for (int j = 0; j < n + m; ++j) objective += cost[j] * x[j];

    while (true) {
      if (iterations >= opt.iteration_limit) return Phase::IterationLimit;
      if (factor.num_updates() >= opt.refactor_interval) {
        if (!refactor()) return Phase::Numerical;
        compute_primal();
        compute_dual();
      }
      int q = -1;
      double best = 0.0;
      double dir = 0.0;
      for (int j = 0; j < n + m; ++j) {
        double viol = 0.0;
        double dj_dir = 0.0;
        switch (status[j]) {
          case VarStatus::AtLower:
            if (d[j] < -opt.dual_tolerance) viol = -d[j], dj_dir = 1.0;
            break;
          case VarStatus::AtUpper:
            if (d[j] > opt.dual_tolerance) viol = d[j], dj_dir = -1.0;
            break;
          case VarStatus::Free:
            if (std::abs(d[j]) > opt.dual_tolerance) viol = std::abs(d[j]), dj_dir = d[j] < 0 ? 1.0 : -1.0;
            break;
          default: break;
        }
        if (viol <= 0.0) continue;
        if (bland ? q < 0 : viol > best) {
          best = viol;
          q = j;
          dir = dj_dir;
        }
      }
      if (q < 0) return Phase::Optimal;

      std::fill(column.begin(), column.end(), 0.0);
      for_column(q, [&](int i, double v) { column[i] = v; });
      ftran(column);

      // x_B changes by -dir * t * column.
      double step = ub[q] - lb[q];
      int r = -1;
      for (int i = 0; i < m; ++i) {
        const double a = column[i];
        if (std::abs(a) <= opt.pivot_tolerance) continue;
        const int j = head[i];
        const double rate = -dir * a;
        double limit = kInf;
        if (rate < 0.0 && std::isfinite(lb[j])) limit = std::max(0.0, x[j] - lb[j]) / -rate;
        if (rate > 0.0 && std::isfinite(ub[j])) limit = std::max(0.0, ub[j] - x[j]) / rate;
        if (limit < step - 1e-12 || (r >= 0 && limit <= step + 1e-12 && std::abs(a) > std::abs(column[r]))) {
          step = std::min(step, limit);
          r = i;
        }
      }
      if (!std::isfinite(step)) return Phase::Numerical;  // unbounded direction; cannot occur with boxes

      for (int i = 0; i < m; ++i)
        if (column[i] != 0.0) x[head[i]] -= dir * step * column[i];
      x[q] += dir * step;

      if (r < 0) {
        status[q] = status[q] == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
        x[q] = nonbasic_value(q);
        ++iterations;
        continue;
      }

      const int p = head[r];
      compute_pivot_row(r);
      const double alpha_rq = alpha_row[q];
      if (std::abs(column[r] - alpha_rq) > 1e-7 * (1.0 + std::abs(column[r]))) {
        if (++numerical_retries > 5) return Phase::Numerical;
        if (!refactor()) return Phase::Numerical;
        compute_primal();
        compute_dual();
        continue;
      }
      numerical_retries = 0;
      const double theta_d = d[q] / column[r];
      for (int j : alpha_touched) {
        if (status[j] == VarStatus::Basic || status[j] == VarStatus::Fixed) continue;
        d[j] -= theta_d * alpha_row[j];
      }
      d[p] = -theta_d;

      const double rate = -dir * column[r];
      VarStatus leaving;
      if (lb[p] == ub[p]) {
        leaving = VarStatus::Fixed;
        x[p] = lb[p];
      } else if (rate < 0.0) {
        leaving = VarStatus::AtLower;
        x[p] = lb[p];
      } else {
        leaving = VarStatus::AtUpper;
        x[p] = ub[p];
      }
      pivot(r, q, column, leaving);
      ++iterations;

      double next = 0.0;
      for (int j = 0; j < n + m; ++j) next += cost[j] * x[j];
      if (next < objective - 1e-12 * (1.0 + std::abs(objective))) {
        objective = next;
        stall = 0;
      } else if (++stall > stall_limit) {
        bland = true;
      }
    }
  }

  LpResult finish(LpStatus st) {
    LpResult res;
    res.status = st;
    res.iterations = iterations;
    res.x.assign(x.begin(), x.begin() + n);
    res.row_activity.assign(m, 0.0);
    for (int j = 0; j < n; ++j)
      for (int k = prob.col_start[j]; k < prob.col_start[j + 1]; ++k)
        res.row_activity[prob.row_index[k]] += prob.value[k] * res.x[j];
    res.objective = 0.0;
    for (int j = 0; j < n; ++j) res.objective += prob.cost[j] * res.x[j];
    res.basis.status = status;
    if (st == LpStatus::Optimal) {
      for (int j = 0; j < n; ++j) {
        if (artificial[j] && std::abs(res.x[j]) >= 0.5 * opt.artificial_bound) {
          res.status = LpStatus::Unbounded;
          break;
        }
      }
      // Snap values sitting within tolerance of their bounds.
      for (int j = 0; j < n; ++j) {
        if (res.x[j] < lb[j]) res.x[j] = lb[j];
        if (res.x[j] > ub[j]) res.x[j] = ub[j];
      }
    }
    return res;
  }

  LpResult run(const Basis* warm) {
    iterations = 0;
    x.assign(n + m, 0.0);
    d.assign(n + m, 0.0);
    for (int j = 0; j < n + m; ++j) {
      if (lb[j] > ub[j] + opt.primal_tolerance) {
        slack_basis();
        return finish(LpStatus::Infeasible);
      }
    }

    bool started = false;
    if (warm != nullptr && same_basic_set(*warm)) {
      status = warm->status;
      normalize_nonbasic();
      compute_primal();
      compute_dual();
      started = repair_dual(1e-7);
    } else if (warm != nullptr && load_basis(*warm) && refactor()) {
      compute_primal();
      compute_dual();
      started = repair_dual(1e-7);
    }
    if (!started) {
      slack_basis();
      if (!refactor()) return finish(LpStatus::NumericalFailure);
      compute_primal();
      compute_dual();
      repair_dual(0.0);
    }

    weight.assign(m, 1.0);
    bool bland = false;
    for (int round = 0; round < 20; ++round) {
      Phase ph = dual_phase(bland);
      if (ph == Phase::Infeasible) return finish(LpStatus::Infeasible);
      if (ph == Phase::Numerical) return finish(LpStatus::NumericalFailure);
      if (ph == Phase::IterationLimit) return finish(LpStatus::IterationLimit);

      // Recompute from the factors before accepting the basis; a failed
      // check is retried on a fresh factorization.
      compute_primal();
      compute_dual();
      if (!primal_feasible()) {
        if (!refactor()) return finish(LpStatus::NumericalFailure);
        compute_primal();
        compute_dual();
        if (!primal_feasible()) continue;
      }

      repair_dual(opt.dual_tolerance);
      const long before = iterations;
      ph = primal_cleanup();
      if (ph == Phase::Numerical) return finish(LpStatus::NumericalFailure);
      if (ph == Phase::IterationLimit) return finish(LpStatus::IterationLimit);
      if (iterations == before) return finish(LpStatus::Optimal);
      compute_primal();
      if (!primal_feasible()) {
        if (!refactor()) return finish(LpStatus::NumericalFailure);
        compute_primal();
      }
      if (primal_feasible()) return finish(LpStatus::Optimal);
      compute_dual();
    }
    return finish(LpStatus::NumericalFailure);
  }
};

DualSimplex::DualSimplex(LpProblem problem, SimplexOptions options)
    : impl_(std::make_unique<Impl>(std::move(problem), options)) {}
DualSimplex::~DualSimplex() = default;
DualSimplex::DualSimplex(DualSimplex&&) noexcept = default;
DualSimplex& DualSimplex::operator=(DualSimplex&&) noexcept = default;

const LpProblem& DualSimplex::problem() const { return impl_->prob; }

void DualSimplex::set_col_bounds(int col, double lower, double upper) {
  impl_->prob.col_lower[col] = lower;
  impl_->prob.col_upper[col] = upper;
  impl_->lb[col] = std::isfinite(lower) ? lower : -impl_->opt.artificial_bound;
  impl_->ub[col] = std::isfinite(upper) ? upper : impl_->opt.artificial_bound;
  impl_->artificial[col] = !std::isfinite(lower) || !std::isfinite(upper);
}

void DualSimplex::set_col_bounds(const std::vector<double>& lower, const std::vector<double>& upper) {
  impl_->prob.col_lower = lower;
  impl_->prob.col_upper = upper;
  impl_->load_bounds();
}

void DualSimplex::set_row_bounds(int row, double lower, double upper) {
  impl_->prob.row_lower[row] = lower;
  impl_->prob.row_upper[row] = upper;
  impl_->lb[impl_->n + row] = lower;
  impl_->ub[impl_->n + row] = upper;
}

LpResult DualSimplex::solve(const Basis* warm) { return impl_->run(warm); }

LpResult solve_lp(const LpProblem& problem, const SimplexOptions& options) {
  DualSimplex simplex(problem, options);
  return simplex.solve();
}

LpResult solve_lp(const MilpInstance& instance, const SimplexOptions& options) {
  return solve_lp(LpProblem::from_instance(instance), options);
}

}  // namespace floodguard
