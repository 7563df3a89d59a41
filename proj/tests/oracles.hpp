#pragma once

// Test-side reference implementations. None of these share code with the
// library beyond the plain data types.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <span>
#include <vector>

#include "morsematch/hasse.hpp"
#include "morsematch/simplicial_complex.hpp"

namespace oracle {

using morsematch::EdgeIndex;
using morsematch::HasseDiagram;
using morsematch::Simplex;

/// Acyclicity by Kahn's algorithm on the whole modified Hasse digraph:
/// unmatched edges point down, matched edges point up.
inline bool kahn_acyclic(const HasseDiagram& h, std::span<const EdgeIndex> m) {
  std::vector<char> matched(h.edge_count(), 0);
  for (EdgeIndex e : m) matched[e] = 1;
  const std::size_t n = h.face_count();
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> indeg(n, 0);
  for (EdgeIndex e = 0; e < h.edge_count(); ++e) {
    auto [lo, up, d] = h.edge(e);
    (void)d;
    if (matched[e]) out[lo].push_back(up), ++indeg[up];
    else out[up].push_back(lo), ++indeg[lo];
  }
  std::queue<std::size_t> q;
  for (std::size_t v = 0; v < n; ++v)
    if (!indeg[v]) q.push(v);
  std::size_t seen = 0;
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    ++seen;
    for (auto w : out[v])
      if (--indeg[w] == 0) q.push(w);
  }
  return seen == n;
}

inline bool pairwise_disjoint(const HasseDiagram& h, std::span<const EdgeIndex> m) {
  std::set<std::uint32_t> used;
  for (EdgeIndex e : m) {
    if (!used.insert(h.edge(e).lower).second) return false;
    if (!used.insert(h.edge(e).upper).second) return false;
  }
  return true;
}

/// f-vector by brute force over all 2^E edge subsets.
inline std::vector<std::uint64_t> subset_fvector(const HasseDiagram& h, bool acyclic) {
  const std::size_t e = h.edge_count();
  if (h.face_count() > 64 || e > 30) throw std::invalid_argument("too large for brute force");
  std::vector<std::uint64_t> faces_of(e);
  for (std::size_t i = 0; i < e; ++i)
    faces_of[i] = (std::uint64_t{1} << h.edge(EdgeIndex(i)).lower) | (std::uint64_t{1} << h.edge(EdgeIndex(i)).upper);
  std::vector<std::uint64_t> f;
  std::vector<EdgeIndex> m;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << e); ++mask) {
    std::uint64_t used = 0;
    bool disjoint = true;
    for (std::uint64_t rest = mask; rest && disjoint; rest &= rest - 1) {
      const auto bits = faces_of[std::size_t(__builtin_ctzll(rest))];
      disjoint = (used & bits) == 0;
      used |= bits;
    }
    if (!disjoint) continue;
    m.clear();
    for (std::uint64_t rest = mask; rest; rest &= rest - 1) m.push_back(EdgeIndex(__builtin_ctzll(rest)));
    if (acyclic && !kahn_acyclic(h, m)) continue;
    if (f.size() < m.size()) f.resize(m.size(), 0);
    ++f[m.size() - 1];
  }
  return f;
}

/// Random matching built by a shuffled greedy pass; acyclic if requested.
inline std::vector<EdgeIndex> random_matching(const HasseDiagram& h, std::mt19937_64& rng, bool acyclic) {
  std::vector<EdgeIndex> order(h.edge_count());
  std::iota(order.begin(), order.end(), EdgeIndex{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<EdgeIndex> m;
  for (EdgeIndex e : order) {
    if (rng() % 3 == 0) continue;
    m.push_back(e);
    if (!pairwise_disjoint(h, m) || (acyclic && !kahn_acyclic(h, m))) m.pop_back();
  }
  std::sort(m.begin(), m.end());
  return m;
}

/// Textbook Smith normal form on a small dense matrix: move the smallest
/// nonzero entry to the pivot, reduce its row and column, repeat until the
/// pivot divides the rest of the block.
inline std::vector<long long> textbook_snf(std::vector<std::vector<long long>> a) {
  const std::size_t r = a.size(), c = r ? a[0].size() : 0;
  std::vector<long long> diag;
  for (std::size_t t = 0; t < std::min(r, c); ++t) {
    for (;;) {
      std::size_t pi = r, pj = c;
      for (std::size_t i = t; i < r; ++i)
        for (std::size_t j = t; j < c; ++j)
          if (a[i][j] && (pi == r || std::llabs(a[i][j]) < std::llabs(a[pi][pj]))) pi = i, pj = j;
      if (pi == r) return diag;
      std::swap(a[t], a[pi]);
      for (auto& row : a) std::swap(row[t], row[pj]);
      bool clean = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        const long long q = a[i][t] / a[t][t];
        for (std::size_t j = t; j < c; ++j) a[i][j] -= q * a[t][j];
        clean = clean && a[i][t] == 0;
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        const long long q = a[t][j] / a[t][t];
        for (std::size_t i = t; i < r; ++i) a[i][j] -= q * a[i][t];
        clean = clean && a[t][j] == 0;
      }
      if (!clean) continue;
      // Divisibility: fold any offending row into the pivot row.
      std::size_t bad = r;
      for (std::size_t i = t + 1; i < r && bad == r; ++i)
        for (std::size_t j = t + 1; j < c; ++j)
          if (a[i][j] % a[t][t]) {
            bad = i;
            break;
          }
      if (bad == r) break;
      for (std::size_t j = t; j < c; ++j) a[t][j] += a[bad][j];
    }
    diag.push_back(std::llabs(a[t][t]));
  }
  return diag;
}

inline long long det(std::vector<std::vector<long long>> a) {
  // Bareiss fraction-free elimination.
  const std::size_t n = a.size();
  long long sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && a[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(a[k], a[s]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return n ? sign * a[n - 1][n - 1] : 1;
}

/// Elementary divisors as ratios of determinantal divisors d_k = gcd of all
/// k x k minors. Only for very small matrices.
inline std::vector<long long> determinantal_snf(const std::vector<std::vector<long long>>& a) {
  const std::size_t r = a.size(), c = r ? a[0].size() : 0;
  std::vector<long long> dk{1};
  for (std::size_t k = 1; k <= std::min(r, c); ++k) {
    long long g = 0;
    std::vector<int> rs(r, 0), cs(c, 0);
    std::fill(rs.end() - long(k), rs.end(), 1);
    do {
      std::fill(cs.begin(), cs.end(), 0);
      std::fill(cs.end() - long(k), cs.end(), 1);
      do {
        std::vector<std::vector<long long>> m;
        for (std::size_t i = 0; i < r; ++i) {
          if (!rs[i]) continue;
          m.emplace_back();
          for (std::size_t j = 0; j < c; ++j)
            if (cs[j]) m.back().push_back(a[i][j]);
        }
        g = std::gcd(g, det(m));
      } while (std::next_permutation(cs.begin(), cs.end()));
    } while (std::next_permutation(rs.begin(), rs.end()));
    if (g == 0) break;
    dk.push_back(std::llabs(g));
  }
  std::vector<long long> out;
  for (std::size_t k = 1; k < dk.size(); ++k) out.push_back(dk[k] / dk[k - 1]);
  return out;
}

}  // namespace oracle
