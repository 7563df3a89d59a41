#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "morsematch/errors.hpp"

namespace morsematch {

/// Column-major sparse integer matrix with 64-bit entries. Zero entries are
/// never stored and each column is kept sorted by row.
///
/// This is the input format; elimination widens entries internally.
class SparseIntMatrix {
 public:
  using Entry = std::pair<std::uint32_t, std::int64_t>;

  SparseIntMatrix() = default;
  SparseIntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  static SparseIntMatrix from_dense(const std::vector<std::vector<std::int64_t>>& a) {
    const std::size_t r = a.size(), c = r ? a[0].size() : 0;
    SparseIntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (a[i].size() != c) throw std::invalid_argument("ragged dense matrix");
      for (std::size_t j = 0; j < c; ++j)
        if (a[i][j] != 0) m.data_[j].emplace_back(std::uint32_t(i), a[i][j]);
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::size_t nnz() const noexcept {
    std::size_t n = 0;
    for (const auto& c : data_) n += c.size();
    return n;
  }

  const std::vector<Entry>& column(std::size_t c) const { return data_.at(c); }

  /// Adds v to entry (r, c).
  void add(std::size_t r, std::size_t c, std::int64_t v) {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("matrix index out of range");
    auto& col = data_[c];
    auto it = std::lower_bound(col.begin(), col.end(), std::uint32_t(r),
                               [](const Entry& e, std::uint32_t row) { return e.first < row; });
    if (it != col.end() && it->first == r) {
      it->second = checked_add(it->second, v);
      if (it->second == 0) col.erase(it);
    } else if (v != 0) {
      col.insert(it, {std::uint32_t(r), v});
    }
  }

  std::int64_t at(std::size_t r, std::size_t c) const {
    const auto& col = data_.at(c);
    auto it = std::lower_bound(col.begin(), col.end(), std::uint32_t(r),
                               [](const Entry& e, std::uint32_t row) { return e.first < row; });
    return (it != col.end() && it->first == r) ? it->second : 0;
  }

  std::vector<std::vector<std::int64_t>> to_dense() const {
    std::vector<std::vector<std::int64_t>> a(rows_, std::vector<std::int64_t>(cols_, 0));
    for (std::size_t c = 0; c < cols_; ++c)
      for (auto [r, v] : data_[c]) a[r][c] = v;
    return a;
  }

  /// this * other, with checked arithmetic.
  SparseIntMatrix multiply(const SparseIntMatrix& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("matrix shapes do not compose");
    SparseIntMatrix out(rows_, other.cols_);
    std::vector<std::int64_t> acc(rows_, 0);
    std::vector<std::uint32_t> touched;
    for (std::size_t j = 0; j < other.cols_; ++j) {
      for (auto [k, b] : other.data_[j])
        for (auto [i, a] : data_[k]) {
          if (acc[i] == 0) touched.push_back(i);
          acc[i] = checked_add(acc[i], checked_mul(a, b));
        }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (auto i : touched) {
        if (acc[i] != 0) out.data_[j].emplace_back(i, acc[i]);
        acc[i] = 0;
      }
      touched.clear();
    }
    return out;
  }

  bool is_zero() const {
    for (const auto& c : data_)
      if (!c.empty()) return false;
    return true;
  }

  friend bool operator==(const SparseIntMatrix&, const SparseIntMatrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::vector<Entry>> data_ = std::vector<std::vector<Entry>>(cols_);
};

}  // namespace morsematch
