#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "morsematch/errors.hpp"
#include "morsematch/sparse_matrix.hpp"

namespace morsematch {

using BigInt = boost::multiprecision::cpp_int;

struct SmithResult {
  /// Nonzero elementary divisors d1 | d2 | ... , all positive.
  std::vector<BigInt> divisors;
  std::size_t rank = 0;
};

struct SmithOptions {
  /// Hand the rest to dense elimination once fill passes this fraction...
  double dense_threshold = 0.2;
  /// ...and the active block has at most this many cells.
  std::size_t dense_switch_cells = 40'000;
  /// Largest residual block dense elimination will accept.
  std::size_t dense_max_cells = 4'000'000;
};

namespace detail {

inline std::int64_t ring_mul(std::int64_t a, std::int64_t b) { return checked_mul(a, b); }
inline std::int64_t ring_sub(std::int64_t a, std::int64_t b) { return checked_sub(a, b); }
inline BigInt ring_mul(const BigInt& a, const BigInt& b) { return a * b; }
inline BigInt ring_sub(const BigInt& a, const BigInt& b) { return a - b; }

/// Smith form of a small dense matrix: smallest-magnitude pivoting, then the
/// diagonal is normalised into a divisor chain with gcd/lcm swaps.
inline std::vector<BigInt> dense_smith(std::vector<std::vector<BigInt>> a) {
  const std::size_t m = a.size(), n = m ? a[0].size() : 0;
  std::vector<BigInt> diag;
  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    for (;;) {
      std::size_t pi = m, pj = n;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a[i][j] != 0 && (pi == m || abs(a[i][j]) < abs(a[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi == m) goto done;
      std::swap(a[t], a[pi]);
      for (auto& row : a) std::swap(row[t], row[pj]);
      const BigInt p = a[t][t];
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (a[i][t] == 0) continue;
        const BigInt q = a[i][t] / p;
        for (std::size_t j = t; j < n; ++j) a[i][j] -= q * a[t][j];
        if (a[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a[t][j] == 0) continue;
        const BigInt q = a[t][j] / p;
        for (std::size_t i = t; i < m; ++i) a[i][j] -= q * a[i][t];
        if (a[t][j] != 0) clean = false;
      }
      if (clean) break;
    }
    diag.push_back(abs(a[t][t]));
  }
done:
  for (std::size_t i = 0; i < diag.size(); ++i)
    for (std::size_t j = i + 1; j < diag.size(); ++j) {
      const BigInt g = gcd(diag[i], diag[j]);
      const BigInt l = diag[i] / g * diag[j];
      diag[i] = g;
      diag[j] = l;
    }
  return diag;
}

/// Sparse elimination with unit pivots only. Column with the fewest entries
/// first; among its +-1 entries, the one whose row is shortest.
template <class T>
class UnitElimination {
 public:
  UnitElimination(const SparseIntMatrix& a, const SmithOptions& opts)
      : opts_(opts), rows_(a.rows()), cols_(a.cols()), col_(a.cols()), version_(a.cols(), 0),
        row_nnz_(a.rows(), 0), row_cols_(a.rows()) {
    for (std::size_t c = 0; c < cols_; ++c) {
      for (auto [r, v] : a.column(c)) {
        col_[c].emplace_back(r, T(v));
        ++row_nnz_[r];
        row_cols_[r].push_back(std::uint32_t(c));
      }
      nnz_ += col_[c].size();
      if (!col_[c].empty()) {
        ++active_cols_;
        heap_.emplace(col_[c].size(), std::uint32_t(c), 0u);
      }
    }
    for (auto k : row_nnz_)
      if (k) ++active_rows_;
  }

  SmithResult run() {
    while (!heap_.empty()) {
      auto [size, c, ver] = heap_.top();
      heap_.pop();
      if (ver != version_[c] || col_[c].empty()) continue;
      std::size_t best = col_[c].size();
      for (std::size_t k = 0; k < col_[c].size(); ++k) {
        const auto& v = col_[c][k].second;
        if (v != 1 && v != -1) continue;
        if (best == col_[c].size() || row_nnz_[col_[c][k].first] < row_nnz_[col_[c][best].first]) best = k;
      }
      if (best == col_[c].size()) continue;  // waits until the column changes
      pivot(c, best);
      if (active_rows_ * active_cols_ <= opts_.dense_switch_cells &&
          double(nnz_) > opts_.dense_threshold * double(active_rows_ * active_cols_))
        break;
    }
    return finish();
  }

 private:
  using Col = std::vector<std::pair<std::uint32_t, T>>;

  void pivot(std::uint32_t c, std::size_t k) {
    const std::uint32_t r = col_[c][k].first;
    const T u = col_[c][k].second;
    const auto users = row_cols_[r];
    for (std::uint32_t c2 : users) {
      if (c2 == c) continue;
      auto& target = col_[c2];
      auto it = std::lower_bound(target.begin(), target.end(), r,
                                 [](const auto& e, std::uint32_t row) { return e.first < row; });
      if (it == target.end() || it->first != r) continue;
      const T factor = ring_mul(it->second, u);
      merge(c2, c, factor);
    }
    for (auto& [row, v] : col_[c]) {
      if (--row_nnz_[row] == 0) --active_rows_;
    }
    nnz_ -= col_[c].size();
    col_[c].clear();
    col_[c].shrink_to_fit();
    --active_cols_;
    row_cols_[r].clear();
    ++rank_;
  }

  // col[dst] -= factor * col[src]
  void merge(std::uint32_t dst, std::uint32_t src, const T& factor) {
    const Col& a = col_[dst];
    const Col& b = col_[src];
    Col out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        out.push_back(a[i++]);
      } else if (i == a.size() || b[j].first < a[i].first) {
        const auto row = b[j].first;
        out.emplace_back(row, ring_sub(T(0), ring_mul(factor, b[j].second)));
        if (row_nnz_[row]++ == 0) ++active_rows_;
        row_cols_[row].push_back(dst);
        ++j;
      } else {
        T v = ring_sub(a[i].second, ring_mul(factor, b[j].second));
        const auto row = a[i].first;
        if (v != 0) out.emplace_back(row, std::move(v));
        else if (--row_nnz_[row] == 0) --active_rows_;
        ++i;
        ++j;
      }
    }
    nnz_ = nnz_ - a.size() + out.size();
    if (out.empty()) --active_cols_;
    col_[dst] = std::move(out);
    ++version_[dst];
    if (!col_[dst].empty()) heap_.emplace(col_[dst].size(), dst, version_[dst]);
  }

  SmithResult finish() {
    SmithResult res;
    res.rank = rank_;
    res.divisors.assign(rank_, BigInt(1));
    std::vector<std::uint32_t> live_cols;
    for (std::uint32_t c = 0; c < cols_; ++c)
      if (!col_[c].empty()) live_cols.push_back(c);
    if (live_cols.empty()) return res;
    std::vector<std::int64_t> row_slot(rows_, -1);
    std::size_t live_rows = 0;
    for (auto c : live_cols)
      for (auto& [r, v] : col_[c])
        if (row_slot[r] < 0) row_slot[r] = std::int64_t(live_rows++);
    if (live_rows * live_cols.size() > opts_.dense_max_cells)
      throw ResourceLimitExceeded("Smith normal form residual block too large for dense elimination");
    std::vector<std::vector<BigInt>> dense(live_rows, std::vector<BigInt>(live_cols.size()));
    for (std::size_t j = 0; j < live_cols.size(); ++j)
      for (auto& [r, v] : col_[live_cols[j]]) dense[std::size_t(row_slot[r])][j] = BigInt(v);
    for (auto& d : dense_smith(std::move(dense))) {
      res.divisors.push_back(std::move(d));
      ++res.rank;
    }
    return res;
  }

  SmithOptions opts_;
  std::size_t rows_, cols_;
  std::vector<Col> col_;
  std::vector<std::uint32_t> version_;
  std::vector<std::uint32_t> row_nnz_;
  std::vector<std::vector<std::uint32_t>> row_cols_;
  std::priority_queue<std::tuple<std::size_t, std::uint32_t, std::uint32_t>,
                      std::vector<std::tuple<std::size_t, std::uint32_t, std::uint32_t>>, std::greater<>>
      heap_;
  std::size_t nnz_ = 0, active_rows_ = 0, active_cols_ = 0, rank_ = 0;
};

}  // namespace detail

/// Elementary divisors and rank over the integers. Runs in 64-bit arithmetic
/// and starts over with arbitrary precision if any intermediate overflows.
inline SmithResult smith_normal_form(const SparseIntMatrix& a, const SmithOptions& opts = {}) {
  try {
    return detail::UnitElimination<std::int64_t>(a, opts).run();
  } catch (const ArithmeticOverflow&) {
    return detail::UnitElimination<BigInt>(a, opts).run();
  }
}

}  // namespace morsematch
