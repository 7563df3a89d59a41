#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "morsematch/enumerate.hpp"
#include "morsematch/errors.hpp"
#include "morsematch/hasse.hpp"
#include "morsematch/optimal.hpp"
#include "morsematch/simplicial_complex.hpp"

namespace morsematch {

enum class Variant { M, MP, GM };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::M: return "M";
    case Variant::MP: return "MP";
    case Variant::GM: return "GM";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "M") return Variant::M;
  if (s == "MP") return Variant::MP;
  if (s == "GM") return Variant::GM;
  throw std::invalid_argument("unknown variant '" + s + "' (expected M, MP or GM)");
}

struct MatchingComplex {
  Variant variant = Variant::M;
  std::shared_ptr<const SimplicialComplex> base;
  std::shared_ptr<const HasseDiagram> hasse;
  /// Vertex i is the Hasse edge edge_of_vertex[i].
  SimplicialComplex complex;
  /// Identity for M and GM. For MP, edges lying in no optimal matching are
  /// dropped and the remaining ones renumbered in increasing order.
  std::vector<EdgeIndex> edge_of_vertex;

  bool is_void() const noexcept { return complex.is_void(); }

  /// Face of the matching complex read back as Hasse edges.
  std::vector<EdgeIndex> edges_of(int d, std::size_t i) const {
    std::vector<EdgeIndex> out;
    for (VertexId v : complex.face(d, i)) out.push_back(edge_of_vertex[v]);
    return out;
  }
};

struct BuildOptions {
  unsigned threads = 1;
  /// Refuse to materialize more faces than this.
  std::uint64_t face_cap = 100'000'000;
};

namespace detail {

inline std::uint64_t fvector_total(const FVector& f) {
  std::uint64_t t = 0;
  for (auto x : f) t = checked_add(t, x);
  return t;
}

[[noreturn]] inline void refuse_materialize(std::uint64_t projected, std::uint64_t cap) {
  throw ResourceLimitExceeded("matching complex would have " + std::to_string(projected) + " faces (cap " +
                              std::to_string(cap) + "); use streaming counts instead");
}

inline MatchingComplex build_enumerated(std::shared_ptr<const HasseDiagram> h, Variant variant, const BuildOptions& opts) {
  const auto mode = variant == Variant::GM ? MatchingMode::all : MatchingMode::acyclic;
  std::uint64_t projected = 0;
  try {
    projected = fvector_total(count_matchings_layered(*h, mode));
  } catch (const ResourceLimitExceeded&) {
    // Layers too wide for an exact projection; the visitor enforces the cap.
  }
  if (projected > opts.face_cap) refuse_materialize(projected, opts.face_cap);
  std::vector<std::vector<VertexId>> by_dim;
  std::uint64_t seen = 0;
  for_each_matching(*h, mode, [&](std::span<const EdgeIndex> m) {
    if (++seen > opts.face_cap) refuse_materialize(seen, opts.face_cap);
    if (by_dim.size() < m.size()) by_dim.resize(m.size());
    by_dim[m.size() - 1].insert(by_dim[m.size() - 1].end(), m.begin(), m.end());
  });
  MatchingComplex out;
  out.variant = variant;
  out.hasse = h;
  out.base = h->complex_ptr();
  // Faces arrive in lexicographic order already, so from_faces only verifies.
  out.complex = SimplicialComplex::from_faces(h->edge_count(), std::move(by_dim), false);
  out.edge_of_vertex.resize(h->edge_count());
  std::iota(out.edge_of_vertex.begin(), out.edge_of_vertex.end(), EdgeIndex{0});
  return out;
}

inline MatchingComplex build_pure(std::shared_ptr<const HasseDiagram> h, const BuildOptions& opts) {
  OptimalOptions oo;
  oo.threads = opts.threads;
  const auto facets = optimal_matchings(*h, oo);
  MatchingComplex out;
  out.variant = Variant::MP;
  out.hasse = h;
  out.base = h->complex_ptr();
  if (facets.empty()) return out;

  const std::size_t card = facets.front().cardinality();
  if (card >= 63) refuse_materialize(~std::uint64_t{0}, opts.face_cap);
  std::uint64_t projected;
  if (__builtin_mul_overflow(std::uint64_t(facets.size()), (std::uint64_t{1} << card) - 1, &projected))
    projected = ~std::uint64_t{0};
  if (projected > opts.face_cap) {
    try {
      projected = std::min(projected, fvector_total(count_matchings_layered(*h, MatchingMode::acyclic)));
    } catch (const ResourceLimitExceeded&) {
    }
    if (projected > opts.face_cap) refuse_materialize(projected, opts.face_cap);
  }

  std::vector<char> used(h->edge_count(), 0);
  for (const auto& m : facets)
    for (EdgeIndex e : m.edges()) used[e] = 1;
  std::vector<VertexId> vertex_of(h->edge_count(), 0);
  for (EdgeIndex e = 0; e < h->edge_count(); ++e)
    if (used[e]) {
      vertex_of[e] = VertexId(out.edge_of_vertex.size());
      out.edge_of_vertex.push_back(e);
    }
  std::vector<Simplex> relabelled;
  relabelled.reserve(facets.size());
  for (const auto& m : facets) {
    Simplex s;
    for (EdgeIndex e : m.edges()) s.push_back(vertex_of[e]);
    relabelled.push_back(std::move(s));
  }
  out.complex = SimplicialComplex::from_facets(out.edge_of_vertex.size(), relabelled);
  return out;
}

}  // namespace detail

/// Materializes M(K), M_P(K) or GM(K). A base with no Hasse edges gives a
/// void result rather than an error.
inline MatchingComplex build_matching_complex(std::shared_ptr<const HasseDiagram> h, Variant variant,
                                              const BuildOptions& opts = {}) {
  if (h->edge_count() == 0) {
    MatchingComplex out;
    out.variant = variant;
    out.hasse = h;
    out.base = h->complex_ptr();
    return out;
  }
  if (variant == Variant::MP) return detail::build_pure(std::move(h), opts);
  return detail::build_enumerated(std::move(h), variant, opts);
}

inline MatchingComplex build_matching_complex(const SimplicialComplex& k, Variant variant, const BuildOptions& opts = {}) {
  return build_matching_complex(std::make_shared<const HasseDiagram>(k), variant, opts);
}

/// Hasse edges of K sent to the same edges of L (shared vertex labels).
/// Strictly increasing, since the canonical edge order only depends on labels.
inline std::vector<EdgeIndex> induced_inclusion(const HasseDiagram& hk, const HasseDiagram& hl) {
  if (!hk.complex().is_subcomplex_of(hl.complex())) throw std::invalid_argument("K is not a subcomplex of L");
  std::vector<EdgeIndex> map;
  map.reserve(hk.edge_count());
  for (EdgeIndex e = 0; e < hk.edge_count(); ++e) {
    const auto& ed = hk.edge(e);
    auto img = hl.find_edge(hk.face_vertices(ed.lower), hk.face_vertices(ed.upper));
    if (!img) throw std::logic_error("cover relation missing in the larger complex");
    map.push_back(*img);
  }
  return map;
}

struct ConePair {
  SimplicialComplex complex;
  VertexId apex;
  /// Hasse edge (apex, {w0, apex}) of the cone.
  EdgeIndex e0;
};

inline ConePair cone_pair(const SimplicialComplex& k, VertexId w0 = 0) {
  if (w0 >= k.vertex_count()) throw std::invalid_argument("w0 is not a vertex of K");
  auto c = cone(k);
  HasseDiagram h(c.complex);
  const Simplex lo{c.apex}, up{w0, c.apex};
  return {std::move(c.complex), c.apex, *h.find_edge(lo, up)};
}

}  // namespace morsematch
