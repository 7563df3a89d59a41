#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace morsematch {

using VertexId = std::uint32_t;

/// A face stored as its strictly increasing vertex list. The empty face is
/// implicit and never stored.
using Simplex = std::vector<VertexId>;

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (VertexId v : s) {
      h ^= v + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

using SimplexSet = std::unordered_set<Simplex, SimplexHash>;

inline bool is_strictly_increasing(std::span<const VertexId> s) {
  return std::adjacent_find(s.begin(), s.end(), std::greater_equal<>{}) == s.end();
}

namespace detail {

// Sorts a flat array of fixed-width tuples lexicographically and drops duplicates.
inline void sort_unique_flat(std::vector<VertexId>& flat, std::size_t width) {
  const std::size_t n = flat.size() / width;
  if (n <= 1) return;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto row = [&](std::uint32_t i) { return flat.begin() + std::ptrdiff_t(i * width); };
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(row(a), row(a) + std::ptrdiff_t(width), row(b),
                                        row(b) + std::ptrdiff_t(width));
  });
  std::vector<VertexId> out;
  out.reserve(flat.size());
  for (std::size_t k = 0; k < n; ++k) {
    auto r = row(order[k]);
    if (k > 0 && std::equal(r, r + std::ptrdiff_t(width), out.end() - std::ptrdiff_t(width))) continue;
    out.insert(out.end(), r, r + std::ptrdiff_t(width));
  }
  flat = std::move(out);
}

}  // namespace detail

/// Finite abstract simplicial complex on the vertex ids 0..vertex_count-1.
///
/// Faces are grouped by dimension; within a dimension they are kept in strict
/// lexicographic order, and a face's position in that list is its index.
/// Every id below vertex_count is a 0-face. Immutable once built.
class SimplicialComplex {
 public:
  /// The void complex (no faces at all).
  SimplicialComplex() = default;

  static SimplicialComplex from_facets(std::size_t vertex_count, const std::vector<Simplex>& facets) {
    std::vector<std::vector<VertexId>> by_dim;
    auto slot = [&](std::size_t d) -> std::vector<VertexId>& {
      if (by_dim.size() <= d) by_dim.resize(d + 1);
      return by_dim[d];
    };
    for (VertexId v = 0; v < vertex_count; ++v) slot(0).push_back(v);
    for (const auto& f : facets) {
      validate_simplex(f, vertex_count);
      if (f.size() > 30) throw std::invalid_argument("facet too large to close downward");
      const std::uint32_t full = (1u << f.size()) - 1u;
      for (std::uint32_t mask = 1; mask <= full; ++mask) {
        auto& dst = slot(std::size_t(std::popcount(mask)) - 1);
        for (std::size_t i = 0; i < f.size(); ++i)
          if (mask & (1u << i)) dst.push_back(f[i]);
      }
    }
    return from_faces(vertex_count, std::move(by_dim), false);
  }

  /// faces_by_dim[d] is a flat array of (d+1)-tuples of increasing ids, in any
  /// order and possibly with duplicates.
  static SimplicialComplex from_faces(std::size_t vertex_count, std::vector<std::vector<VertexId>> faces_by_dim,
                                      bool verify_closure = true) {
    while (!faces_by_dim.empty() && faces_by_dim.back().empty()) faces_by_dim.pop_back();
    SimplicialComplex k;
    k.vertex_count_ = vertex_count;
    for (std::size_t d = 0; d < faces_by_dim.size(); ++d) {
      auto& flat = faces_by_dim[d];
      const std::size_t w = d + 1;
      if (flat.size() % w != 0) throw std::invalid_argument("face array length is not a multiple of its width");
      for (std::size_t i = 0; i < flat.size(); i += w)
        validate_simplex(std::span<const VertexId>(flat.data() + i, w), vertex_count);
      if (!std::is_sorted(flat.begin(), flat.end()) || d > 0) detail::sort_unique_flat(flat, w);
      else flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    }
    k.faces_ = std::move(faces_by_dim);
    if (k.face_count(0) != vertex_count)
      throw std::invalid_argument("vertex ids must form the contiguous range 0..vertex_count-1");
    if (verify_closure && !k.has_downward_closure())
      throw std::invalid_argument("face list is not closed under taking faces");
    return k;
  }

  bool is_void() const noexcept { return faces_.empty(); }
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  /// -1 for the void complex.
  int dimension() const noexcept { return int(faces_.size()) - 1; }

  std::size_t face_count(int d) const noexcept {
    if (d < 0 || std::size_t(d) >= faces_.size()) return 0;
    return faces_[std::size_t(d)].size() / std::size_t(d + 1);
  }

  std::size_t total_faces() const noexcept {
    std::size_t t = 0;
    for (int d = 0; d <= dimension(); ++d) t += face_count(d);
    return t;
  }

  std::span<const VertexId> face(int d, std::size_t i) const {
    const std::size_t w = std::size_t(d) + 1;
    return {faces_[std::size_t(d)].data() + i * w, w};
  }

  Simplex simplex(int d, std::size_t i) const {
    auto f = face(d, i);
    return {f.begin(), f.end()};
  }

  /// Flat storage of all d-faces, (d+1) ids per face.
  std::span<const VertexId> faces_flat(int d) const {
    if (d < 0 || std::size_t(d) >= faces_.size()) return {};
    return faces_[std::size_t(d)];
  }

  std::optional<std::size_t> index_of(std::span<const VertexId> s) const {
    if (s.empty() || s.size() > faces_.size()) return std::nullopt;
    const std::size_t w = s.size();
    const auto& flat = faces_[w - 1];
    std::size_t lo = 0, hi = flat.size() / w;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const VertexId* row = flat.data() + mid * w;
      if (std::lexicographical_compare(row, row + w, s.begin(), s.end())) lo = mid + 1;
      else hi = mid;
    }
    if (lo < flat.size() / w && std::equal(s.begin(), s.end(), flat.data() + lo * w)) return lo;
    return std::nullopt;
  }

  bool contains(std::span<const VertexId> s) const { return index_of(s).has_value(); }

  std::vector<std::uint64_t> f_vector() const {
    std::vector<std::uint64_t> f;
    for (int d = 0; d <= dimension(); ++d) f.push_back(face_count(d));
    return f;
  }

  std::int64_t euler_characteristic() const {
    std::int64_t chi = 0;
    for (int d = 0; d <= dimension(); ++d) chi += (d % 2 == 0 ? 1 : -1) * std::int64_t(face_count(d));
    return chi;
  }

  /// Maximal faces, ordered by dimension then lexicographically.
  std::vector<Simplex> facets() const {
    std::vector<Simplex> out;
    for (int d = 0; d <= dimension(); ++d) {
      std::vector<char> covered(face_count(d), 0);
      if (d < dimension()) {
        Simplex sub;
        for (std::size_t j = 0; j < face_count(d + 1); ++j) {
          auto t = face(d + 1, j);
          for (std::size_t drop = 0; drop < t.size(); ++drop) {
            sub.clear();
            for (std::size_t q = 0; q < t.size(); ++q)
              if (q != drop) sub.push_back(t[q]);
            covered[*index_of(sub)] = 1;
          }
        }
      }
      for (std::size_t i = 0; i < face_count(d); ++i)
        if (!covered[i]) out.push_back(simplex(d, i));
    }
    return out;
  }

  bool has_downward_closure() const {
    if (face_count(0) != vertex_count_) return false;
    for (std::size_t v = 0; v < vertex_count_; ++v)
      if (faces_[0][v] != v) return false;
    Simplex sub;
    for (int d = 1; d <= dimension(); ++d) {
      for (std::size_t i = 0; i < face_count(d); ++i) {
        auto t = face(d, i);
        for (std::size_t drop = 0; drop < t.size(); ++drop) {
          sub.clear();
          for (std::size_t q = 0; q < t.size(); ++q)
            if (q != drop) sub.push_back(t[q]);
          if (!contains(sub)) return false;
        }
      }
    }
    return true;
  }

  /// Face-set inclusion with shared vertex labels.
  bool is_subcomplex_of(const SimplicialComplex& other) const {
    if (vertex_count_ > other.vertex_count_) return false;
    for (int d = 0; d <= dimension(); ++d)
      for (std::size_t i = 0; i < face_count(d); ++i)
        if (!other.contains(face(d, i))) return false;
    return true;
  }

  friend bool operator==(const SimplicialComplex&, const SimplicialComplex&) = default;

 private:
  static void validate_simplex(std::span<const VertexId> s, std::size_t vertex_count) {
    if (s.empty()) throw std::invalid_argument("empty simplex");
    if (!is_strictly_increasing(s)) throw std::invalid_argument("simplex vertices must be strictly increasing");
    if (s.back() >= vertex_count)
      throw std::invalid_argument("vertex id " + std::to_string(s.back()) + " out of range");
  }

  std::size_t vertex_count_ = 0;
  std::vector<std::vector<VertexId>> faces_;
};

// ---------------------------------------------------------------------------
// Standard families

inline SimplicialComplex build_simplex(int n) {
  if (n < 0) throw std::invalid_argument("simplex dimension must be >= 0");
  Simplex all(std::size_t(n) + 1);
  std::iota(all.begin(), all.end(), 0u);
  return SimplicialComplex::from_facets(all.size(), {all});
}

/// All proper faces of the n-simplex. n = 0 would give the void complex and is rejected.
inline SimplicialComplex build_boundary(int n) {
  if (n < 1) throw std::invalid_argument("boundary requires n >= 1");
  std::vector<Simplex> facets;
  for (int skip = 0; skip <= n; ++skip) {
    Simplex f;
    for (int v = 0; v <= n; ++v)
      if (v != skip) f.push_back(VertexId(v));
    facets.push_back(std::move(f));
  }
  return SimplicialComplex::from_facets(std::size_t(n) + 1, facets);
}

inline SimplicialComplex skeleton(const SimplicialComplex& k, int dim) {
  if (dim < 0) throw std::invalid_argument("skeleton dimension must be >= 0");
  std::vector<std::vector<VertexId>> by_dim;
  for (int d = 0; d <= std::min(dim, k.dimension()); ++d) {
    auto flat = k.faces_flat(d);
    by_dim.emplace_back(flat.begin(), flat.end());
  }
  return SimplicialComplex::from_faces(k.vertex_count(), std::move(by_dim), false);
}

struct Cone {
  SimplicialComplex complex;
  VertexId apex;
};

/// v * K with the apex appended as the next fresh vertex id.
inline Cone cone(const SimplicialComplex& k) {
  if (k.is_void()) throw std::invalid_argument("cannot cone the void complex");
  const auto apex = VertexId(k.vertex_count());
  std::vector<std::vector<VertexId>> by_dim(std::size_t(k.dimension()) + 2);
  for (int d = 0; d <= k.dimension(); ++d) {
    auto flat = k.faces_flat(d);
    by_dim[std::size_t(d)].insert(by_dim[std::size_t(d)].end(), flat.begin(), flat.end());
    auto& up = by_dim[std::size_t(d) + 1];
    for (std::size_t i = 0; i < k.face_count(d); ++i) {
      auto f = k.face(d, i);
      up.insert(up.end(), f.begin(), f.end());
      up.push_back(apex);
    }
  }
  by_dim[0].push_back(apex);
  return {SimplicialComplex::from_faces(k.vertex_count() + 1, std::move(by_dim), false), apex};
}

struct StarLink {
  std::vector<Simplex> star;          ///< all faces containing s, in canonical order
  SimplicialComplex link;             ///< relabelled onto 0..m-1
  std::vector<VertexId> link_vertices;  ///< link vertex id -> ambient vertex id
};

inline StarLink star_link(const SimplicialComplex& k, std::span<const VertexId> s) {
  if (!k.contains(s)) throw std::invalid_argument("simplex is not a face of the complex");
  StarLink out;
  std::vector<Simplex> link_faces;
  for (int d = int(s.size()) - 1; d <= k.dimension(); ++d) {
    for (std::size_t i = 0; i < k.face_count(d); ++i) {
      auto t = k.face(d, i);
      if (!std::includes(t.begin(), t.end(), s.begin(), s.end())) continue;
      out.star.emplace_back(t.begin(), t.end());
      Simplex rest;
      std::set_difference(t.begin(), t.end(), s.begin(), s.end(), std::back_inserter(rest));
      if (!rest.empty()) link_faces.push_back(std::move(rest));
    }
  }
  for (const auto& f : link_faces) out.link_vertices.insert(out.link_vertices.end(), f.begin(), f.end());
  std::sort(out.link_vertices.begin(), out.link_vertices.end());
  out.link_vertices.erase(std::unique(out.link_vertices.begin(), out.link_vertices.end()), out.link_vertices.end());
  if (link_faces.empty()) return out;
  std::vector<std::vector<VertexId>> by_dim;
  for (const auto& f : link_faces) {
    if (by_dim.size() < f.size()) by_dim.resize(f.size());
    for (VertexId v : f) {
      auto it = std::lower_bound(out.link_vertices.begin(), out.link_vertices.end(), v);
      by_dim[f.size() - 1].push_back(VertexId(it - out.link_vertices.begin()));
    }
  }
  out.link = SimplicialComplex::from_faces(out.link_vertices.size(), std::move(by_dim), false);
  return out;
}

/// True iff `sub` (faces in the ambient labels of k) is a subcomplex of k that
/// contains every face of k whose vertices all lie in sub.
inline bool is_full_subcomplex(const SimplicialComplex& k, const std::vector<Simplex>& sub) {
  SimplexSet members;
  std::vector<char> in_sub(k.vertex_count(), 0);
  for (const auto& f : sub) {
    if (!k.contains(f)) throw std::invalid_argument("subcomplex face is not a face of the ambient complex");
    members.insert(f);
    for (VertexId v : f) in_sub[v] = 1;
  }
  for (int d = 0; d <= k.dimension(); ++d) {
    for (std::size_t i = 0; i < k.face_count(d); ++i) {
      auto t = k.face(d, i);
      if (!std::all_of(t.begin(), t.end(), [&](VertexId v) { return in_sub[v] != 0; })) continue;
      if (!members.contains(Simplex(t.begin(), t.end()))) return false;
    }
  }
  return true;
}

}  // namespace morsematch
