#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "morsematch/simplicial_complex.hpp"

namespace morsematch {

/// Global face id: faces numbered by dimension, then lexicographically.
using FaceId = std::uint32_t;
/// Position of a cover relation in the canonical edge order.
using EdgeIndex = std::uint32_t;

struct HasseEdge {
  FaceId lower;  ///< dimension p
  FaceId upper;  ///< dimension p + 1
  int dim;       ///< p
};

/// Codimension-one cover relation of a complex.
///
/// Edges are ordered by (p, lower face, upper face), faces compared
/// lexicographically. That order is the vertex order of every matching
/// complex built on top of this diagram.
class HasseDiagram {
 public:
  explicit HasseDiagram(SimplicialComplex k) : HasseDiagram(std::make_shared<const SimplicialComplex>(std::move(k))) {}

  explicit HasseDiagram(std::shared_ptr<const SimplicialComplex> k) : complex_(std::move(k)) {
    if (!complex_) throw std::invalid_argument("null complex");
    const auto& K = *complex_;
    const int top = K.dimension();
    for (int d = 0; d <= top; ++d) {
      offset_.push_back(FaceId(face_dim_.size()));
      face_dim_.insert(face_dim_.end(), K.face_count(d), d);
    }
    offset_.push_back(FaceId(face_dim_.size()));

    Simplex sub;
    for (int p = 0; p < top; ++p) {
      layer_begin_.push_back(EdgeIndex(edges_.size()));
      std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
      for (std::size_t j = 0; j < K.face_count(p + 1); ++j) {
        auto t = K.face(p + 1, j);
        for (std::size_t drop = 0; drop < t.size(); ++drop) {
          sub.clear();
          for (std::size_t q = 0; q < t.size(); ++q)
            if (q != drop) sub.push_back(t[q]);
          pairs.emplace_back(std::uint32_t(*K.index_of(sub)), std::uint32_t(j));
        }
      }
      std::sort(pairs.begin(), pairs.end());
      for (auto [lo, up] : pairs) edges_.push_back({offset_[std::size_t(p)] + lo, offset_[std::size_t(p) + 1] + up, p});
    }
    layer_begin_.push_back(EdgeIndex(edges_.size()));

    const std::size_t nf = face_dim_.size();
    up_begin_.assign(nf + 1, 0);
    down_begin_.assign(nf + 1, 0);
    for (const auto& e : edges_) {
      ++up_begin_[e.lower + 1];
      ++down_begin_[e.upper + 1];
    }
    for (std::size_t f = 0; f < nf; ++f) {
      up_begin_[f + 1] += up_begin_[f];
      down_begin_[f + 1] += down_begin_[f];
    }
    up_.resize(edges_.size());
    down_.resize(edges_.size());
    auto up_fill = up_begin_, down_fill = down_begin_;
    for (EdgeIndex i = 0; i < edges_.size(); ++i) {
      up_[up_fill[edges_[i].lower]++] = i;
      down_[down_fill[edges_[i].upper]++] = i;
    }
  }

  const SimplicialComplex& complex() const noexcept { return *complex_; }
  const std::shared_ptr<const SimplicialComplex>& complex_ptr() const noexcept { return complex_; }

  std::size_t face_count() const noexcept { return face_dim_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<HasseEdge>& edges() const noexcept { return edges_; }
  const HasseEdge& edge(EdgeIndex e) const { return edges_.at(e); }

  /// Number of cover layers (dimension of the complex, 0 when void).
  int layer_count() const noexcept { return int(layer_begin_.size()) - 1; }
  /// Edges of layer p occupy [layer_begin(p), layer_begin(p + 1)).
  EdgeIndex layer_begin(int p) const { return layer_begin_.at(std::size_t(p)); }

  int face_dim(FaceId f) const { return face_dim_.at(f); }
  std::size_t face_position(FaceId f) const { return f - offset_[std::size_t(face_dim(f))]; }
  FaceId face_id(int d, std::size_t i) const { return offset_.at(std::size_t(d)) + FaceId(i); }
  std::span<const VertexId> face_vertices(FaceId f) const { return complex_->face(face_dim(f), face_position(f)); }

  std::optional<FaceId> find_face(std::span<const VertexId> s) const {
    auto i = complex_->index_of(s);
    if (!i) return std::nullopt;
    return face_id(int(s.size()) - 1, *i);
  }

  /// Edges in which f is the lower face.
  std::span<const EdgeIndex> up_edges(FaceId f) const { return {up_.data() + up_begin_[f], up_begin_[f + 1] - up_begin_[f]}; }
  /// Edges in which f is the upper face.
  std::span<const EdgeIndex> down_edges(FaceId f) const {
    return {down_.data() + down_begin_[f], down_begin_[f + 1] - down_begin_[f]};
  }

  std::optional<EdgeIndex> find_edge(FaceId lower, FaceId upper) const {
    for (EdgeIndex e : up_edges(lower))
      if (edges_[e].upper == upper) return e;
    return std::nullopt;
  }

  std::optional<EdgeIndex> find_edge(std::span<const VertexId> lower, std::span<const VertexId> upper) const {
    auto lo = find_face(lower);
    auto up = find_face(upper);
    if (!lo || !up) return std::nullopt;
    return find_edge(*lo, *up);
  }

  /// Human-readable "(lower,upper)" label, e.g. "(0,01)" style with comma-separated ids.
  std::string edge_label(EdgeIndex e) const {
    auto fmt = [](std::span<const VertexId> s) {
      std::string out = "{";
      for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
      return out + "}";
    };
    return "(" + fmt(face_vertices(edges_.at(e).lower)) + "," + fmt(face_vertices(edges_.at(e).upper)) + ")";
  }

 private:
  std::shared_ptr<const SimplicialComplex> complex_;
  std::vector<int> face_dim_;
  std::vector<FaceId> offset_;
  std::vector<HasseEdge> edges_;
  std::vector<EdgeIndex> layer_begin_;
  std::vector<std::uint32_t> up_begin_, down_begin_;
  std::vector<EdgeIndex> up_, down_;
};

inline HasseDiagram build_hasse(const SimplicialComplex& k) { return HasseDiagram(k); }

/// A set of Hasse edges kept as a strictly increasing index list.
class Matching {
 public:
  Matching() = default;
  explicit Matching(std::vector<EdgeIndex> edges) : edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  }
  Matching(std::initializer_list<EdgeIndex> edges) : Matching(std::vector<EdgeIndex>(edges)) {}

  std::span<const EdgeIndex> edges() const noexcept { return edges_; }
  std::size_t cardinality() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  bool contains(EdgeIndex e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

  friend auto operator<=>(const Matching&, const Matching&) = default;

 private:
  std::vector<EdgeIndex> edges_;
};

/// Mutable matching on a fixed diagram with an incremental acyclicity test.
///
/// A directed cycle of the modified Hasse diagram alternates between two
/// adjacent dimensions, so adding (sigma, tau) closes a cycle iff a gradient
/// path leads from tau back down to sigma inside that single layer.
class MatchingState {
 public:
  explicit MatchingState(const HasseDiagram& h)
      : h_(&h), matched_(h.face_count(), kNone), mark_(h.face_count(), 0) {}

  static constexpr std::int32_t kNone = -1;

  const HasseDiagram& hasse() const noexcept { return *h_; }
  std::int32_t matched_edge(FaceId f) const noexcept { return matched_[f]; }
  bool is_matched(FaceId f) const noexcept { return matched_[f] != kNone; }

  bool is_free(EdgeIndex e) const {
    const auto& ed = h_->edges()[e];
    return matched_[ed.lower] == kNone && matched_[ed.upper] == kNone;
  }

  bool creates_cycle(EdgeIndex e) const {
    const auto& edges = h_->edges();
    const FaceId sigma = edges[e].lower;
    if (++epoch_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0u);
      epoch_ = 1;
    }
    stack_.clear();
    stack_.push_back(edges[e].upper);
    mark_[edges[e].upper] = epoch_;
    while (!stack_.empty()) {
      const FaceId u = stack_.back();
      stack_.pop_back();
      for (EdgeIndex d : h_->down_edges(u)) {
        if (d == e || std::int32_t(d) == matched_[u]) continue;
        const FaceId s = edges[d].lower;
        if (s == sigma) return true;
        const std::int32_t m = matched_[s];
        if (m == kNone || edges[std::size_t(m)].lower != s) continue;
        const FaceId w = edges[std::size_t(m)].upper;
        if (mark_[w] == epoch_) continue;
        mark_[w] = epoch_;
        stack_.push_back(w);
      }
    }
    return false;
  }

  void add(EdgeIndex e) {
    const auto& ed = h_->edges()[e];
    matched_[ed.lower] = std::int32_t(e);
    matched_[ed.upper] = std::int32_t(e);
  }

  void remove(EdgeIndex e) {
    const auto& ed = h_->edges()[e];
    matched_[ed.lower] = kNone;
    matched_[ed.upper] = kNone;
  }

 private:
  const HasseDiagram* h_;
  std::vector<std::int32_t> matched_;
  mutable std::vector<std::uint32_t> mark_;
  mutable std::uint32_t epoch_ = 0;
  mutable std::vector<FaceId> stack_;
};

inline void check_edge_range(const HasseDiagram& h, std::span<const EdgeIndex> edges) {
  for (EdgeIndex e : edges)
    if (e >= h.edge_count()) throw std::out_of_range("Hasse edge index " + std::to_string(e) + " out of range");
}

/// True iff the edges are pairwise face-disjoint. The input is read as a set.
inline bool is_matching(const HasseDiagram& h, std::span<const EdgeIndex> edges) {
  check_edge_range(h, edges);
  std::vector<EdgeIndex> uniq(edges.begin(), edges.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<char> used(h.face_count(), 0);
  for (EdgeIndex e : uniq) {
    const auto& ed = h.edge(e);
    if (used[ed.lower] || used[ed.upper]) return false;
    used[ed.lower] = used[ed.upper] = 1;
  }
  return true;
}

/// Gradient vector field test. Rejects non-matchings with std::invalid_argument.
inline bool is_acyclic(const HasseDiagram& h, std::span<const EdgeIndex> edges) {
  if (!is_matching(h, edges)) throw std::invalid_argument("edge set is not a matching");
  MatchingState state(h);
  for (EdgeIndex e : edges) {
    if (state.is_matched(h.edge(e).lower)) continue;  // duplicate entry
    if (state.creates_cycle(e)) return false;
    state.add(e);
  }
  return true;
}

inline bool is_acyclic(const HasseDiagram& h, const Matching& m) { return is_acyclic(h, m.edges()); }
inline bool is_matching(const HasseDiagram& h, const Matching& m) { return is_matching(h, m.edges()); }

struct CriticalReport {
  std::vector<std::vector<FaceId>> by_dim;  ///< unmatched faces per dimension
  std::vector<std::uint64_t> counts;        ///< m_i

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

inline CriticalReport critical_faces(const HasseDiagram& h, std::span<const EdgeIndex> edges) {
  if (!is_matching(h, edges)) throw std::invalid_argument("edge set is not a matching");
  std::vector<char> used(h.face_count(), 0);
  for (EdgeIndex e : edges) used[h.edge(e).lower] = used[h.edge(e).upper] = 1;
  CriticalReport r;
  const int top = h.complex().dimension();
  r.by_dim.resize(std::size_t(top + 1));
  r.counts.assign(std::size_t(top + 1), 0);
  for (FaceId f = 0; f < h.face_count(); ++f)
    if (!used[f]) {
      r.by_dim[std::size_t(h.face_dim(f))].push_back(f);
      ++r.counts[std::size_t(h.face_dim(f))];
    }
  return r;
}

inline CriticalReport critical_faces(const HasseDiagram& h, const Matching& m) { return critical_faces(h, m.edges()); }

/// Number of matched pairs (sigma^(p), tau^(p+1)) for each p.
inline std::vector<std::uint64_t> pairs_per_layer(const HasseDiagram& h, std::span<const EdgeIndex> edges) {
  std::vector<std::uint64_t> out(std::size_t(std::max(h.layer_count(), 0)), 0);
  for (EdgeIndex e : edges) ++out[std::size_t(h.edge(e).dim)];
  return out;
}

}  // namespace morsematch
