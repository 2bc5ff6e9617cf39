#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>

namespace floodguard::detail {

namespace {

constexpr double kThreshold = 0.1;      // relative pivot threshold
constexpr double kSingletonRatio = 0.01;
constexpr double kTinyPivot = 1e-11;
constexpr int kSearchColumns = 4;

// Items bucketed by count with intrusive doubly linked lists.
class Buckets {
 public:
  explicit Buckets(int n) : head_(n + 2, -1), next_(n, -1), prev_(n, -1) {}
  void insert(int id, int count) {
    next_[id] = head_[count];
    prev_[id] = -1;
    if (head_[count] >= 0) prev_[head_[count]] = id;
    head_[count] = id;
    ++size_;
  }
  void erase(int id, int count) {
    if (prev_[id] >= 0) next_[prev_[id]] = next_[id];
    else head_[count] = next_[id];
    if (next_[id] >= 0) prev_[next_[id]] = prev_[id];
    --size_;
  }
  int head(int count) const { return head_[count]; }
  // First item with count >= from, scanning buckets upward.
  int first(int from) const {
    for (std::size_t c = from; c < head_.size(); ++c)
      if (head_[c] >= 0) return head_[c];
    return -1;
  }
  // Next item in bucket order after `id`, which sits in bucket `count`.
  int next(int id, int count) const {
    if (next_[id] >= 0) return next_[id];
    return first(count + 1);
  }
  int size() const { return size_; }

 private:
  std::vector<int> head_, next_, prev_;
  int size_ = 0;
};

}  // namespace

bool BasisFactor::factor(int m, const std::vector<int>& start, const std::vector<int>& index,
                         const std::vector<double>& value) {
  m_ = m;
  etas_.clear();
  singular_positions.clear();
  unpivoted_rows.clear();
  prow_.clear();
  pcol_.clear();
  diag_.clear();
  scratch_.assign(m, 0.0);

  std::vector<int> l_start{0}, l_index;
  std::vector<double> l_value;
  std::vector<int> u_start{0}, u_pos;  // U rows by pivot, entries as basis positions
  std::vector<double> u_value;
  auto push_pivot = [&](int i, int j, double v) {
    prow_.push_back(i);
    pcol_.push_back(j);
    diag_.push_back(v);
  };

  // Row-wise copy of the pattern with values.
  std::vector<int> rstart(m + 1, 0);
  for (int e = 0; e < start[m]; ++e) ++rstart[index[e] + 1];
  for (int i = 0; i < m; ++i) rstart[i + 1] += rstart[i];
  std::vector<int> rcol(start[m]);
  std::vector<double> rval(start[m]);
  {
    std::vector<int> fill(rstart.begin(), rstart.end() - 1);
    for (int j = 0; j < m; ++j)
      for (int e = start[j]; e < start[j + 1]; ++e) {
        rcol[fill[index[e]]] = j;
        rval[fill[index[e]]++] = value[e];
      }
  }

  // Triangular pass: column and row singletons cause no fill, so only the
  // active counts change.
  std::vector<char> col_on(m, 1), row_on(m, 1);
  std::vector<int> ccount(m), rcount(m);
  std::vector<int> col_queue, row_queue;
  for (int j = 0; j < m; ++j) {
    ccount[j] = start[j + 1] - start[j];
    if (ccount[j] == 1) col_queue.push_back(j);
  }
  for (int i = 0; i < m; ++i) {
    rcount[i] = rstart[i + 1] - rstart[i];
    if (rcount[i] == 1) row_queue.push_back(i);
  }
  std::size_t cq = 0, rq = 0;
  while (cq < col_queue.size() || rq < row_queue.size()) {
    if (cq < col_queue.size()) {
      const int j = col_queue[cq++];
      if (!col_on[j] || ccount[j] != 1) continue;
      int i = -1;
      double v = 0.0;
      for (int e = start[j]; e < start[j + 1]; ++e)
        if (row_on[index[e]]) i = index[e], v = value[e];
      if (std::abs(v) < kTinyPivot) continue;
      push_pivot(i, j, v);
      col_on[j] = 0;
      row_on[i] = 0;
      for (int e = rstart[i]; e < rstart[i + 1]; ++e) {
        const int j2 = rcol[e];
        if (!col_on[j2]) continue;
        u_pos.push_back(j2);
        u_value.push_back(rval[e]);
        if (--ccount[j2] == 1) col_queue.push_back(j2);
      }
      u_start.push_back(static_cast<int>(u_pos.size()));
      l_start.push_back(static_cast<int>(l_index.size()));
      continue;
    }
    const int i = row_queue[rq++];
    if (!row_on[i] || rcount[i] != 1) continue;
    int j = -1;
    double v = 0.0;
    for (int e = rstart[i]; e < rstart[i + 1]; ++e)
      if (col_on[rcol[e]]) j = rcol[e], v = rval[e];
    double vmax = 0.0;
    for (int e = start[j]; e < start[j + 1]; ++e)
      if (row_on[index[e]]) vmax = std::max(vmax, std::abs(value[e]));
    if (std::abs(v) < kTinyPivot || std::abs(v) < kSingletonRatio * vmax) continue;
    push_pivot(i, j, v);
    col_on[j] = 0;
    row_on[i] = 0;
    for (int e = start[j]; e < start[j + 1]; ++e) {
      const int i2 = index[e];
      if (!row_on[i2]) continue;
      l_index.push_back(i2);
      l_value.push_back(value[e] / v);
      if (--rcount[i2] == 1) row_queue.push_back(i2);
    }
    l_start.push_back(static_cast<int>(l_index.size()));
    u_start.push_back(static_cast<int>(u_pos.size()));
  }

  // Markowitz elimination on the remaining bump.
  std::vector<int> bump_cols;
  for (int j = 0; j < m; ++j)
    if (col_on[j]) bump_cols.push_back(j);
  if (!bump_cols.empty()) {
    std::vector<Column> colv(m);
    std::vector<std::vector<int>> rowp(m);
    for (int j : bump_cols)
      for (int e = start[j]; e < start[j + 1]; ++e)
        if (row_on[index[e]] && value[e] != 0.0) {
          colv[j].push_back({index[e], value[e]});
          rowp[index[e]].push_back(j);
        }
    Buckets col_set(m), row_set(m);
    for (int j : bump_cols) col_set.insert(j, ccount[j] = static_cast<int>(colv[j].size()));
    for (int i = 0; i < m; ++i)
      if (row_on[i]) row_set.insert(i, rcount[i] = static_cast<int>(rowp[i].size()));
    auto set_ccount = [&](int j, int c) {
      col_set.erase(j, ccount[j]);
      col_set.insert(j, ccount[j] = c);
    };
    auto set_rcount = [&](int i, int c) {
      row_set.erase(i, rcount[i]);
      row_set.insert(i, rcount[i] = c);
    };
    auto find_in = [](Column& c, int row) -> std::pair<int, double>* {
      for (auto& e : c)
        if (e.first == row) return &e;
      return nullptr;
    };

    std::vector<std::pair<int, double>> urow;
    while (col_set.size() > 0) {
      int pi = -1, pj = -1;
      double pv = 0.0;
      const int cj = col_set.first(0);
      if (ccount[cj] == 0) {
        singular_positions.push_back(cj);
        col_set.erase(cj, 0);
        continue;
      }
      if (ccount[cj] == 1) {
        pi = colv[cj][0].first;
        pj = cj;
        pv = colv[cj][0].second;
        if (std::abs(pv) < kTinyPivot) pi = -1;
      }
      if (pi < 0 && row_set.head(1) >= 0) {
        const int i = row_set.head(1);
        const int j = rowp[i][0];
        double vmax = 0.0, v = 0.0;
        for (const auto& [r, a] : colv[j]) {
          vmax = std::max(vmax, std::abs(a));
          if (r == i) v = a;
        }
        if (std::abs(v) >= kSingletonRatio * vmax && std::abs(v) >= kTinyPivot) pi = i, pj = j, pv = v;
      }
      if (pi < 0) {
        pv = 0.0;
        long best_cost = -1;
        int seen = 0;
        for (int j = col_set.first(0); j >= 0 && seen < kSearchColumns; j = col_set.next(j, ccount[j]), ++seen) {
          double vmax = 0.0;
          for (const auto& e : colv[j]) vmax = std::max(vmax, std::abs(e.second));
          if (vmax < kTinyPivot) continue;
          for (const auto& [i, a] : colv[j]) {
            if (std::abs(a) < kThreshold * vmax) continue;
            const long cost = static_cast<long>(rcount[i] - 1) * (ccount[j] - 1);
            if (best_cost < 0 || cost < best_cost || (cost == best_cost && std::abs(a) > std::abs(pv))) {
              best_cost = cost;
              pi = i, pj = j, pv = a;
            }
          }
        }
        if (pi < 0) {
          // Every candidate column is numerically empty.
          const int j = col_set.first(0);
          singular_positions.push_back(j);
          col_set.erase(j, ccount[j]);
          for (const auto& [i, a] : colv[j]) {
            auto& rp = rowp[i];
            rp.erase(std::find(rp.begin(), rp.end(), j));
            set_rcount(i, static_cast<int>(rp.size()));
          }
          continue;
        }
      }

      urow.clear();
      for (int j : rowp[pi]) {
        if (j == pj) continue;
        urow.push_back({j, find_in(colv[j], pi)->second});
      }
      push_pivot(pi, pj, pv);
      row_on[pi] = 0;

      for (const auto& [i, a] : colv[pj]) {
        if (i == pi) continue;
        const double l = a / pv;
        l_index.push_back(i);
        l_value.push_back(l);
        auto& rp = rowp[i];
        rp.erase(std::find(rp.begin(), rp.end(), pj));
        for (const auto& [j, u] : urow) {
          if (auto* e = find_in(colv[j], i)) {
            e->second -= l * u;
          } else {
            colv[j].push_back({i, -l * u});
            rp.push_back(j);
            set_ccount(j, static_cast<int>(colv[j].size()));
          }
        }
        set_rcount(i, static_cast<int>(rp.size()));
      }
      l_start.push_back(static_cast<int>(l_index.size()));
      for (const auto& [j, u] : urow) {
        auto& c = colv[j];
        c.erase(std::find_if(c.begin(), c.end(), [&](const auto& e) { return e.first == pi; }));
        set_ccount(j, static_cast<int>(c.size()));
        u_pos.push_back(j);
        u_value.push_back(u);
      }
      u_start.push_back(static_cast<int>(u_pos.size()));
      col_set.erase(pj, ccount[pj]);
      row_set.erase(pi, rcount[pi]);
      colv[pj].clear();
      rowp[pi].clear();
    }
  }

  if (!singular_positions.empty()) {
    for (int i = 0; i < m; ++i)
      if (row_on[i]) unpivoted_rows.push_back(i);
    return false;
  }

  std::vector<int> kof(m);
  for (int k = 0; k < m; ++k) kof[pcol_[k]] = k;
  l_start_ = std::move(l_start);
  l_index_ = std::move(l_index);
  l_value_ = std::move(l_value);

  urow_start_ = std::move(u_start);
  urow_index_.resize(u_pos.size());
  urow_value_ = std::move(u_value);
  ucol_start_.assign(m + 1, 0);
  for (std::size_t e = 0; e < u_pos.size(); ++e) {
    urow_index_[e] = kof[u_pos[e]];
    ++ucol_start_[urow_index_[e] + 1];
  }
  for (int k = 0; k < m; ++k) ucol_start_[k + 1] += ucol_start_[k];
  ucol_index_.resize(u_pos.size());
  ucol_value_.resize(u_pos.size());
  std::vector<int> fill(ucol_start_.begin(), ucol_start_.end() - 1);
  for (int k = 0; k < m; ++k) {
    for (int e = urow_start_[k]; e < urow_start_[k + 1]; ++e) {
      const int c = fill[urow_index_[e]]++;
      ucol_index_[c] = k;
      ucol_value_[c] = urow_value_[e];
    }
  }
  return true;
}

void BasisFactor::ftran(std::vector<double>& v) const {
  for (int k = 0; k < m_; ++k) {
    const double vk = v[prow_[k]];
    if (vk == 0.0) continue;
    for (int e = l_start_[k]; e < l_start_[k + 1]; ++e) v[l_index_[e]] -= l_value_[e] * vk;
  }
  for (int k = m_ - 1; k >= 0; --k) {
    const double xk = v[prow_[k]] / diag_[k];
    scratch_[pcol_[k]] = xk;
    if (xk == 0.0) continue;
    for (int e = ucol_start_[k]; e < ucol_start_[k + 1]; ++e) v[prow_[ucol_index_[e]]] -= ucol_value_[e] * xk;
  }
  v.swap(scratch_);
  for (const auto& e : etas_) {
    const double vr = v[e.pos];
    if (vr == 0.0) continue;
    const double scaled = vr / e.pivot;
    v[e.pos] = scaled;
    for (const auto& [i, a] : e.entries) v[i] -= a * scaled;
  }
}

void BasisFactor::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double sum = v[it->pos];
    for (const auto& [i, a] : it->entries) sum -= a * v[i];
    v[it->pos] = sum / it->pivot;
  }
  for (int k = 0; k < m_; ++k) {
    const double z = v[pcol_[k]] / diag_[k];
    scratch_[prow_[k]] = z;
    if (z == 0.0) continue;
    for (int e = urow_start_[k]; e < urow_start_[k + 1]; ++e) v[pcol_[urow_index_[e]]] -= urow_value_[e] * z;
  }
  v.swap(scratch_);
  for (int k = m_ - 1; k >= 0; --k) {
    double sum = 0.0;
    for (int e = l_start_[k]; e < l_start_[k + 1]; ++e) sum += l_value_[e] * v[l_index_[e]];
    v[prow_[k]] -= sum;
  }
}

void BasisFactor::update(int r, const std::vector<double>& alpha) {
  Eta eta;
  eta.pos = r;
  eta.pivot = alpha[r];
  for (int i = 0; i < m_; ++i)
    if (i != r && alpha[i] != 0.0) eta.entries.emplace_back(i, alpha[i]);
  etas_.push_back(std::move(eta));
}

}  // namespace floodguard::detail
