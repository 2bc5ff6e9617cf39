#include "floodguard/mip.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

namespace floodguard {

const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::Infeasible: return "infeasible";
    case MipStatus::NodeLimit: return "node-limit";
    case MipStatus::Unbounded: return "unbounded";
    case MipStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return kInf;
  return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

namespace {

int branch_priority(VarRole role) {
  switch (role) {
    case VarRole::CrewStart: return 1;
    case VarRole::CrewWork: return 2;
    case VarRole::SubstationAvailable:
    case VarRole::LineAvailable: return 3;
    default: return 0;
  }
}

struct Node {
  long id = 0;
  long parent = -1;
  int depth = 0;
  double bound = -kInf;
  std::vector<signed char> fix;  // per binary: -1 free, else fixed value
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpInstance& inst, const MipOptions& opt)
      : inst_(inst), opt_(opt), simplex_(LpProblem::from_instance(inst), opt.lp) {
    for (std::size_t j = 0; j < inst.catalog.size(); ++j) {
      if (!inst.catalog[j].is_binary()) continue;
      bin_.push_back(static_cast<int>(j));
      prio_.push_back(branch_priority(inst.catalog[j].role));
      lo0_.push_back(std::max(0.0, std::ceil(inst.catalog[j].lower - opt.integrality_tolerance)));
      hi0_.push_back(std::min(1.0, std::floor(inst.catalog[j].upper + opt.integrality_tolerance)));
    }
  }

  MipResult run() {
    MipResult out;
    Node root;
    root.fix.assign(bin_.size(), -1);
    for (std::size_t b = 0; b < bin_.size(); ++b)
      if (lo0_[b] > hi0_[b]) {
        out.status = MipStatus::Infeasible;
        return out;
      }
    heap_.push_back(std::move(root));
    next_id_ = 1;
    bool failed = false;

    while (!heap_.empty()) {
      if (nodes_ >= opt_.node_limit) break;
      std::pop_heap(heap_.begin(), heap_.end(), NodeOrder{});
      Node node = std::move(heap_.back());
      heap_.pop_back();
      if (pruned(node.bound)) continue;

      apply(node.fix);
      LpResult res = solve(node.basis.get());
      ++nodes_;
      NodeRecord rec;
      rec.id = node.id;
      rec.parent = node.parent;
      rec.depth = node.depth;
      rec.parent_objective = node.bound;
      rec.bound = node.bound;

      if (res.status == LpStatus::Unbounded && node.id == 0) {
        out.status = MipStatus::Unbounded;
        out.nodes = nodes_;
        out.lp_iterations = iterations_;
        return out;
      }
      if (res.status != LpStatus::Optimal && res.status != LpStatus::Infeasible) {
        failed = true;
        break;
      }
      if (res.status == LpStatus::Infeasible) {
        rec.infeasible = true;
        rec.lp_objective = kInf;
        report(rec);
        continue;
      }
      rec.lp_objective = res.objective;
      const double obj = std::max(res.objective, node.bound);
      const int branch = pick_branch(res.x);
      if (branch < 0) {
        rec.integral = true;
        consider(res);
        report(rec);
        continue;
      }
      if (pruned(obj)) {
        report(rec);
        continue;
      }
      if (opt_.dive_interval > 0 &&
          (node.id == 0 || nodes_ % opt_.dive_interval == 0 || (!has_inc_ && nodes_ < opt_.dive_interval))) {
        dive(node.fix, res);
        if (pruned(obj)) {
          report(rec);
          continue;
        }
      }
      report(rec);

      auto basis = std::make_shared<const Basis>(std::move(res.basis));
      for (int v : {0, 1}) {
        Node child;
        child.id = next_id_++;
        child.parent = node.id;
        child.depth = node.depth + 1;
        child.bound = obj;
        child.fix = node.fix;
        child.fix[branch] = static_cast<signed char>(v);
        child.basis = basis;
        heap_.push_back(std::move(child));
        std::push_heap(heap_.begin(), heap_.end(), NodeOrder{});
      }
    }

    out.nodes = nodes_;
    out.lp_iterations = iterations_;
    out.has_incumbent = has_inc_;
    if (has_inc_) {
      out.objective = inc_;
      out.x = inc_x_;
    }
    if (failed) {
      out.status = MipStatus::NumericalFailure;
      out.bound = heap_.empty() ? -kInf : heap_.front().bound;
      out.gap = relative_gap(out.objective, out.bound);
      return out;
    }
    double bound = has_inc_ ? inc_ : kInf;
    for (const auto& n : heap_)
      if (!pruned(n.bound)) bound = std::min(bound, n.bound);
    out.bound = bound;
    out.gap = has_inc_ ? relative_gap(inc_, bound) : kInf;
    const bool exhausted = heap_.empty() || bound >= (has_inc_ ? inc_ : kInf);
    if (exhausted || (has_inc_ && out.gap <= opt_.gap_tolerance)) {
      out.status = has_inc_ ? MipStatus::Optimal : MipStatus::Infeasible;
      if (has_inc_ && exhausted) {
        out.bound = std::min(bound, inc_);
        out.gap = relative_gap(inc_, out.bound);
      }
    } else {
      out.status = MipStatus::NodeLimit;
    }
    return out;
  }

 private:
  bool pruned(double bound) const {
    if (!has_inc_) return false;
    return bound >= inc_ - opt_.gap_tolerance * std::max(1.0, std::abs(inc_));
  }

  void apply(const std::vector<signed char>& fix) {
    for (std::size_t b = 0; b < bin_.size(); ++b) {
      const double lo = fix[b] < 0 ? lo0_[b] : fix[b];
      const double hi = fix[b] < 0 ? hi0_[b] : fix[b];
      simplex_.set_col_bounds(bin_[b], lo, hi);
    }
  }

  LpResult solve(const Basis* warm) {
    LpResult r = simplex_.solve(warm);
    iterations_ += r.iterations;
    if (warm != nullptr && r.status != LpStatus::Optimal && r.status != LpStatus::Infeasible) {
      r = simplex_.solve(nullptr);
      iterations_ += r.iterations;
    }
    return r;
  }

  double fractionality(double v) const { return std::abs(v - std::round(v)); }

  // Most fractional binary in the best priority class; -1 when integral.
  int pick_branch(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = 0.0;
    int best_prio = 1 << 30;
    for (std::size_t b = 0; b < bin_.size(); ++b) {
      const double f = fractionality(x[bin_[b]]);
      if (f <= opt_.integrality_tolerance) continue;
      if (prio_[b] < best_prio || (prio_[b] == best_prio && f > best_frac + 1e-12)) {
        best = static_cast<int>(b);
        best_frac = f;
        best_prio = prio_[b];
      }
    }
    return best;
  }

  // Least fractional binary in the best priority class.
  int pick_dive(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = 1.0;
    int best_prio = 1 << 30;
    for (std::size_t b = 0; b < bin_.size(); ++b) {
      const double f = fractionality(x[bin_[b]]);
      if (f <= opt_.integrality_tolerance) continue;
      if (prio_[b] < best_prio || (prio_[b] == best_prio && f < best_frac - 1e-12)) {
        best = static_cast<int>(b);
        best_frac = f;
        best_prio = prio_[b];
      }
    }
    return best;
  }

  void consider(const LpResult& res) {
    if (has_inc_ && res.objective >= inc_) return;
    has_inc_ = true;
    inc_ = res.objective;
    inc_x_ = res.x;
    for (int j : bin_) inc_x_[j] = std::round(inc_x_[j]);
  }

  // Depth-first descent from a node LP: fix the least fractional binary to
  // its rounded value, trying the opposite value on failure, and backtrack
  // within a budget of LP solves.
  void dive(std::vector<signed char> fix, const LpResult& cur) {
    long budget = opt_.dive_budget;
    descend(fix, cur, budget);
  }

  bool descend(std::vector<signed char>& fix, const LpResult& cur, long& budget) {
    if (pruned(cur.objective)) return false;
    const int b = pick_dive(cur.x);
    if (b < 0) {
      consider(cur);
      return true;
    }
    const signed char first = static_cast<signed char>(std::round(cur.x[bin_[b]]));
    for (signed char v : {first, static_cast<signed char>(1 - first)}) {
      if (budget <= 0) break;
      --budget;
      fix[b] = v;
      apply(fix);
      LpResult next = solve(&cur.basis);
      if (next.status == LpStatus::Optimal && descend(fix, next, budget)) {
        fix[b] = -1;
        return true;
      }
    }
    fix[b] = -1;
    return false;
  }

  void report(NodeRecord& rec) {
    rec.incumbent = has_inc_ ? inc_ : kInf;
    if (opt_.log) {
      *opt_.log << "node " << rec.id << " parent " << rec.parent << " depth " << rec.depth << " lp "
                << rec.lp_objective << " bound " << rec.bound << " incumbent " << rec.incumbent << '\n';
    }
    if (opt_.on_node) opt_.on_node(rec);
  }

  const MilpInstance& inst_;
  const MipOptions& opt_;
  DualSimplex simplex_;
  std::vector<int> bin_, prio_;
  std::vector<double> lo0_, hi0_;
  std::vector<Node> heap_;
  long next_id_ = 0;
  long nodes_ = 0;
  long iterations_ = 0;
  bool has_inc_ = false;
  double inc_ = kInf;
  std::vector<double> inc_x_;
};

}  // namespace

MipResult solve_mip(const MilpInstance& instance, const MipOptions& options) {
  BranchAndBound bb(instance, options);
  return bb.run();
}

WarmStartReport warm_start_check(const MilpInstance& instance, const std::map<std::string, double>& assignment) {
  const auto& cat = instance.catalog;
  std::vector<std::string> missing;
  for (std::size_t j = 0; j < cat.size(); ++j)
    if (cat[j].is_binary() && !assignment.count(cat[j].name)) missing.push_back(cat[j].name);
  if (!missing.empty()) {
    std::ostringstream s;
    s << "assignment is missing " << missing.size() << " binary variable(s):";
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 20); ++i) s << ' ' << missing[i];
    if (missing.size() > 20) s << " ...";
    throw IncompleteAssignment(s.str(), std::move(missing));
  }

  LpProblem lp = LpProblem::from_instance(instance);
  std::vector<double> x(cat.size(), 0.0);
  for (std::size_t j = 0; j < cat.size(); ++j) {
    if (!cat[j].is_binary()) continue;
    const double v = assignment.at(cat[j].name);
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("assignment for " + cat[j].name + " must be 0 or 1");
    lp.col_lower[j] = lp.col_upper[j] = v;
    x[j] = v;
  }

  WarmStartReport rep;
  std::set<std::string> fams;
  for (const auto& c : instance.constraints) {
    const bool binary_only =
        std::all_of(c.terms.begin(), c.terms.end(), [&](const Term& t) { return cat[t.var].is_binary(); });
    if (binary_only && c.violation(x) > 1e-9) fams.insert(std::string(family_name(c.family)));
  }
  for (std::size_t j = 0; j < cat.size(); ++j)
    if (cat[j].is_binary() && (x[j] < cat[j].lower || x[j] > cat[j].upper))
      fams.insert("variable_bounds");

  if (!fams.empty()) {
    rep.lp_status = LpStatus::Infeasible;
    rep.violated_families.assign(fams.begin(), fams.end());
    rep.message = "fixed binaries violate constraints over binaries only";
    return rep;
  }

  DualSimplex simplex(lp);
  LpResult res = simplex.solve();
  rep.lp_status = res.status;
  if (res.status == LpStatus::Optimal) {
    rep.feasible = true;
    rep.objective = res.objective;
    rep.x = res.x;
    rep.message = "feasible";
    return rep;
  }
  if (res.status != LpStatus::Infeasible) {
    rep.message = std::string("continuous LP ended with status ") + to_string(res.status);
    return rep;
  }

  std::set<Family> mixed;
  for (const auto& c : instance.constraints) mixed.insert(c.family);
  for (Family f : mixed) {
    for (std::size_t i = 0; i < instance.constraints.size(); ++i)
      if (instance.constraints[i].family == f) simplex.set_row_bounds(static_cast<int>(i), -kInf, kInf);
    if (simplex.solve().status == LpStatus::Optimal) fams.insert(std::string(family_name(f)));
    for (std::size_t i = 0; i < instance.constraints.size(); ++i)
      if (instance.constraints[i].family == f)
        simplex.set_row_bounds(static_cast<int>(i), lp.row_lower[i], lp.row_upper[i]);
  }
  rep.violated_families.assign(fams.begin(), fams.end());
  rep.message = fams.empty() ? "continuous LP infeasible; no single constraint family explains it"
                             : "continuous LP infeasible";
  return rep;
}

}  // namespace floodguard
