#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "morsematch/errors.hpp"
#include "morsematch/simplicial_complex.hpp"

namespace morsematch {

struct IsomorphismOptions {
  std::uint64_t node_budget = 10'000'000;
};

namespace detail {

class IsomorphismSearch {
 public:
  IsomorphismSearch(const SimplicialComplex& a, const SimplicialComplex& b, const IsomorphismOptions& opts)
      : a_(a), b_(b), opts_(opts) {}

  std::optional<std::vector<VertexId>> run() {
    if (a_.f_vector() != b_.f_vector()) return std::nullopt;
    const std::size_t n = a_.vertex_count();
    if (!refine_colors()) return std::nullopt;
    order_vertices();
    bucket_faces();
    map_.assign(n, kUnset);
    used_.assign(n, 0);
    if (!extend(0)) return std::nullopt;
    return map_;
  }

 private:
  static constexpr VertexId kUnset = ~VertexId{0};

  static std::vector<std::vector<VertexId>> adjacency(const SimplicialComplex& k) {
    std::vector<std::vector<VertexId>> adj(k.vertex_count());
    for (std::size_t i = 0; i < k.face_count(1); ++i) {
      auto e = k.face(1, i);
      adj[e[0]].push_back(e[1]);
      adj[e[1]].push_back(e[0]);
    }
    return adj;
  }

  static std::vector<std::vector<std::uint64_t>> star_counts(const SimplicialComplex& k) {
    std::vector<std::vector<std::uint64_t>> sig(k.vertex_count(), std::vector<std::uint64_t>(std::size_t(k.dimension()) + 1, 0));
    for (int d = 0; d <= k.dimension(); ++d)
      for (std::size_t i = 0; i < k.face_count(d); ++i)
        for (VertexId v : k.face(d, i)) ++sig[v][std::size_t(d)];
    return sig;
  }

  // Colour refinement over the 1-skeleton, seeded with per-vertex star
  // f-vectors; colours are shared between both complexes so they compare.
  bool refine_colors() {
    adj_a_ = adjacency(a_);
    adj_b_ = adjacency(b_);
    std::map<std::vector<std::uint64_t>, std::uint32_t> palette;
    auto seed = [&](const SimplicialComplex& k) {
      std::vector<std::uint32_t> c;
      for (auto& s : star_counts(k)) c.push_back(palette.emplace(s, std::uint32_t(palette.size())).first->second);
      return c;
    };
    color_a_ = seed(a_);
    color_b_ = seed(b_);
    for (int round = 0; round < 3; ++round) {
      std::map<std::vector<std::uint64_t>, std::uint32_t> next;
      auto step = [&](const std::vector<std::uint32_t>& col, const std::vector<std::vector<VertexId>>& adj) {
        std::vector<std::uint32_t> out(col.size());
        for (std::size_t v = 0; v < col.size(); ++v) {
          std::vector<std::uint64_t> key{col[v]};
          std::vector<std::uint64_t> nb;
          for (VertexId u : adj[v]) nb.push_back(col[u]);
          std::sort(nb.begin(), nb.end());
          key.insert(key.end(), nb.begin(), nb.end());
          out[v] = next.emplace(std::move(key), std::uint32_t(next.size())).first->second;
        }
        return out;
      };
      color_a_ = step(color_a_, adj_a_);
      color_b_ = step(color_b_, adj_b_);
    }
    auto ca = color_a_, cb = color_b_;
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    if (ca != cb) return false;
    class_size_.assign(ca.empty() ? 0 : ca.back() + 1, 0);
    for (auto c : ca) ++class_size_[c];
    return true;
  }

  void order_vertices() {
    const std::size_t n = a_.vertex_count();
    std::vector<char> placed(n, 0);
    std::vector<std::uint32_t> placed_neighbours(n, 0);
    position_.assign(n, 0);
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t best = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (placed[v]) continue;
        if (best == n) { best = v; continue; }
        auto key = [&](std::size_t x) {
          return std::make_tuple(-std::int64_t(placed_neighbours[x]), class_size_[color_a_[x]], x);
        };
        if (key(v) < key(best)) best = v;
      }
      placed[best] = 1;
      position_[best] = std::uint32_t(order_.size());
      order_.push_back(VertexId(best));
      for (VertexId u : adj_a_[best]) ++placed_neighbours[u];
    }
  }

  // Each face is checked exactly once, when its last vertex gets mapped.
  void bucket_faces() {
    completed_.assign(a_.vertex_count(), {});
    for (int d = 1; d <= a_.dimension(); ++d)
      for (std::size_t i = 0; i < a_.face_count(d); ++i) {
        auto f = a_.face(d, i);
        std::uint32_t last = 0;
        for (VertexId v : f) last = std::max(last, position_[v]);
        completed_[last].push_back(Simplex(f.begin(), f.end()));
      }
  }

  bool faces_ok(std::size_t pos) {
    Simplex image;
    for (const auto& f : completed_[pos]) {
      image.clear();
      for (VertexId v : f) image.push_back(map_[v]);
      std::sort(image.begin(), image.end());
      if (!b_.contains(image)) return false;
    }
    return true;
  }

  bool extend(std::size_t pos) {
    if (pos == order_.size()) return true;
    const VertexId x = order_[pos];
    for (VertexId y = 0; y < b_.vertex_count(); ++y) {
      if (used_[y] || color_b_[y] != color_a_[x]) continue;
      if (++nodes_ > opts_.node_budget)
        throw BudgetExceeded("isomorphism search exceeded its node budget");
      map_[x] = y;
      used_[y] = 1;
      if (faces_ok(pos) && extend(pos + 1)) return true;
      used_[y] = 0;
      map_[x] = kUnset;
    }
    return false;
  }

  const SimplicialComplex& a_;
  const SimplicialComplex& b_;
  IsomorphismOptions opts_;
  std::vector<std::vector<VertexId>> adj_a_, adj_b_;
  std::vector<std::uint32_t> color_a_, color_b_, class_size_;
  std::vector<VertexId> order_;
  std::vector<std::uint32_t> position_;
  std::vector<std::vector<Simplex>> completed_;
  std::vector<VertexId> map_;
  std::vector<char> used_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Searches for a vertex bijection a -> b carrying faces onto faces.
/// Returns the map indexed by a's vertex ids, or nullopt when none exists.
/// Throws BudgetExceeded instead of guessing when the search runs too long.
inline std::optional<std::vector<VertexId>> is_isomorphic(const SimplicialComplex& a, const SimplicialComplex& b,
                                                          const IsomorphismOptions& opts = {}) {
  if (a.is_void() || b.is_void()) throw std::invalid_argument("isomorphism test needs non-void complexes");
  return detail::IsomorphismSearch(a, b, opts).run();
}

}  // namespace morsematch
