#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "morsematch/parallel.hpp"
#include "morsematch/simplicial_complex.hpp"
#include "morsematch/smith.hpp"
#include "morsematch/sparse_matrix.hpp"

namespace morsematch {

/// Simplicial chain complex with lexicographic bases.
/// boundary[d] maps C_d to C_{d-1}; boundary[0] is the 1 x n_0 augmentation
/// when reduced, an empty 0 x n_0 matrix otherwise.
struct ChainComplex {
  bool reduced = false;
  std::vector<std::size_t> sizes;
  std::vector<SparseIntMatrix> boundary;

  int top() const { return int(sizes.size()) - 1; }
};

struct HomologyGroup {
  int degree = 0;
  std::uint64_t betti = 0;
  std::vector<BigInt> torsion;  ///< divisors > 1, each dividing the next

  friend bool operator==(const HomologyGroup&, const HomologyGroup&) = default;
};

struct HomologyResult {
  bool is_void = false;
  bool reduced = false;
  std::vector<HomologyGroup> groups;  ///< degrees 0..dim, in order

  std::uint64_t betti(int d) const {
    for (const auto& g : groups)
      if (g.degree == d) return g.betti;
    return 0;
  }

  bool torsion_free() const {
    return std::all_of(groups.begin(), groups.end(), [](const HomologyGroup& g) { return g.torsion.empty(); });
  }

  /// Degrees with nonzero groups.
  std::vector<int> support() const {
    std::vector<int> out;
    for (const auto& g : groups)
      if (g.betti || !g.torsion.empty()) out.push_back(g.degree);
    return out;
  }

  std::int64_t alternating_betti_sum() const {
    std::int64_t s = 0;
    for (const auto& g : groups) s += (g.degree % 2 ? -1 : 1) * std::int64_t(g.betti);
    return s;
  }
};

struct HomologyOptions {
  unsigned threads = 1;
  SmithOptions smith{};
};

/// Boundary entry for dropping vertex i of a sorted simplex is (-1)^i.
inline ChainComplex boundary_matrices(const SimplicialComplex& k, bool reduced) {
  if (k.is_void()) throw std::invalid_argument("void complex has no chain complex");
  ChainComplex cc;
  cc.reduced = reduced;
  for (int d = 0; d <= k.dimension(); ++d) cc.sizes.push_back(k.face_count(d));
  SparseIntMatrix aug(reduced ? 1 : 0, k.face_count(0));
  if (reduced)
    for (std::size_t v = 0; v < k.face_count(0); ++v) aug.add(0, v, 1);
  cc.boundary.push_back(std::move(aug));
  Simplex sub;
  for (int d = 1; d <= k.dimension(); ++d) {
    SparseIntMatrix m(k.face_count(d - 1), k.face_count(d));
    for (std::size_t j = 0; j < k.face_count(d); ++j) {
      auto t = k.face(d, j);
      for (std::size_t i = 0; i < t.size(); ++i) {
        sub.assign(t.begin(), t.end());
        sub.erase(sub.begin() + std::ptrdiff_t(i));
        m.add(*k.index_of(sub), j, i % 2 ? -1 : 1);
      }
    }
    cc.boundary.push_back(std::move(m));
  }
  return cc;
}

/// Verifies that consecutive boundary maps compose to zero.
inline bool is_chain_complex(const ChainComplex& cc) {
  for (std::size_t d = 1; d < cc.boundary.size(); ++d)
    if (cc.boundary[d - 1].rows() > 0 && !cc.boundary[d - 1].multiply(cc.boundary[d]).is_zero()) return false;
  return true;
}

namespace detail {

// betti_d = n_d - rank d_d - rank d_{d+1}; torsion_d from d_{d+1}.
inline HomologyResult homology_of(const ChainComplex& cc, const HomologyOptions& opts) {
  const std::size_t top = cc.sizes.size();
  std::vector<SmithResult> snf(top + 1);
  parallel_for(top, opts.threads, [&](std::size_t d) { snf[d] = smith_normal_form(cc.boundary[d], opts.smith); });
  HomologyResult out;
  out.reduced = cc.reduced;
  for (std::size_t d = 0; d < top; ++d) {
    const std::size_t rank_here = snf[d].rank, rank_above = snf[d + 1].rank;
    if (rank_here + rank_above > cc.sizes[d]) throw std::logic_error("rank exceeds chain group size");
    HomologyGroup g;
    g.degree = int(d);
    g.betti = cc.sizes[d] - rank_here - rank_above;
    for (const auto& div : snf[d + 1].divisors)
      if (div > 1) g.torsion.push_back(div);
    out.groups.push_back(std::move(g));
  }
  return out;
}

inline void check_euler(const HomologyResult& h, std::int64_t chi) {
  if (h.alternating_betti_sum() != chi)
    throw std::logic_error("alternating Betti sum " + std::to_string(h.alternating_betti_sum()) +
                           " disagrees with Euler characteristic " + std::to_string(chi));
}

}  // namespace detail

/// Integral homology; a void complex yields a result flagged is_void with no groups.
inline HomologyResult homology(const SimplicialComplex& k, bool reduced, const HomologyOptions& opts = {}) {
  if (k.is_void()) return {true, reduced, {}};
  auto out = detail::homology_of(boundary_matrices(k, reduced), opts);
  detail::check_euler(out, k.euler_characteristic() - (reduced ? 1 : 0));
  return out;
}

/// Homology of the pair (L, K), where K is carried into L by `vertex_map`
/// (identity when empty). Computed on the quotient chain complex: basis =
/// faces of L outside the image of K, boundary entries landing in K dropped.
///
/// The reduced and unreduced versions agree for every pair; with K void the
/// quotient of augmented complexes is the unaugmented complex of L.
inline HomologyResult relative_homology(const SimplicialComplex& l, const SimplicialComplex& k,
                                        std::vector<VertexId> vertex_map = {}, bool reduced = true,
                                        const HomologyOptions& opts = {}) {
  if (vertex_map.empty())
    for (VertexId v = 0; v < k.vertex_count(); ++v) vertex_map.push_back(v);
  if (vertex_map.size() != k.vertex_count()) throw std::invalid_argument("vertex map has the wrong length");
  if (l.is_void()) {
    if (!k.is_void()) throw std::invalid_argument("K is not a subcomplex of L");
    return {true, reduced, {}};
  }

  // Mark faces of L that lie in the image of K.
  std::vector<std::vector<char>> in_k(std::size_t(l.dimension()) + 1);
  for (int d = 0; d <= l.dimension(); ++d) in_k[std::size_t(d)].assign(l.face_count(d), 0);
  Simplex img;
  for (int d = 0; d <= k.dimension(); ++d) {
    for (std::size_t i = 0; i < k.face_count(d); ++i) {
      img.clear();
      for (VertexId v : k.face(d, i)) {
        if (vertex_map[v] >= l.vertex_count()) throw std::invalid_argument("vertex map leaves L");
        img.push_back(vertex_map[v]);
      }
      std::sort(img.begin(), img.end());
      if (std::adjacent_find(img.begin(), img.end()) != img.end())
        throw std::invalid_argument("vertex map is not injective on a face of K");
      auto pos = l.index_of(img);
      if (!pos) throw std::invalid_argument("K is not a subcomplex of L");
      if (in_k[std::size_t(d)][*pos]) throw std::invalid_argument("vertex map is not injective on K");
      in_k[std::size_t(d)][*pos] = 1;
    }
  }

  std::vector<std::vector<std::int64_t>> slot(in_k.size());
  ChainComplex cc;
  cc.reduced = reduced;
  for (int d = 0; d <= l.dimension(); ++d) {
    std::int64_t next = 0;
    for (char m : in_k[std::size_t(d)]) slot[std::size_t(d)].push_back(m ? -1 : next++);
    cc.sizes.push_back(std::size_t(next));
  }
  while (!cc.sizes.empty() && cc.sizes.back() == 0) cc.sizes.pop_back();

  cc.boundary.emplace_back(0, cc.sizes.empty() ? 0 : cc.sizes[0]);
  Simplex sub;
  for (int d = 1; d < int(cc.sizes.size()); ++d) {
    SparseIntMatrix m(cc.sizes[std::size_t(d) - 1], cc.sizes[std::size_t(d)]);
    for (std::size_t j = 0; j < l.face_count(d); ++j) {
      const auto col = slot[std::size_t(d)][j];
      if (col < 0) continue;
      auto t = l.face(d, j);
      for (std::size_t i = 0; i < t.size(); ++i) {
        sub.assign(t.begin(), t.end());
        sub.erase(sub.begin() + std::ptrdiff_t(i));
        const auto row = slot[std::size_t(d) - 1][*l.index_of(sub)];
        if (row >= 0) m.add(std::size_t(row), std::size_t(col), i % 2 ? -1 : 1);
      }
    }
    cc.boundary.push_back(std::move(m));
  }
  if (!is_chain_complex(cc)) throw std::logic_error("relative boundary maps do not compose to zero");
  auto out = detail::homology_of(cc, opts);
  // Pad to the dimension of L so every degree is listed.
  for (int d = int(out.groups.size()); d <= l.dimension(); ++d) out.groups.push_back({d, 0, {}});
  out.reduced = reduced;
  detail::check_euler(out, l.euler_characteristic() - k.euler_characteristic());
  return out;
}

/// Reduced-homology convention for a void complex: Z in degree -1.
inline std::uint64_t reduced_betti_or_void(const HomologyResult& h, int degree) {
  if (h.is_void) return degree == -1 ? 1 : 0;
  return h.betti(degree);
}

}  // namespace morsematch
