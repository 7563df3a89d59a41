#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "morsematch/errors.hpp"
#include "morsematch/hasse.hpp"
#include "morsematch/parallel.hpp"

namespace morsematch {

enum class MatchingMode { all, acyclic };

/// Counts indexed by dimension: entry c-1 counts matchings with c pairs.
using FVector = std::vector<std::uint64_t>;

struct EnumerationOptions {
  unsigned threads = 1;
  /// Subtrees rooted at this many chosen edges become parallel work items.
  unsigned split_depth = 3;
  /// Maximum number of search nodes; 0 means unlimited.
  std::uint64_t node_budget = 0;
};

namespace detail {

inline void bump(FVector& f, std::size_t cardinality) {
  if (f.size() < cardinality) f.resize(cardinality, 0);
  f[cardinality - 1] = checked_add(f[cardinality - 1], std::uint64_t{1});
}

inline void accumulate(FVector& into, const FVector& from) {
  if (into.size() < from.size()) into.resize(from.size(), 0);
  for (std::size_t i = 0; i < from.size(); ++i) into[i] = checked_add(into[i], from[i]);
}

class NodeMeter {
 public:
  NodeMeter(std::atomic<std::uint64_t>* shared, std::uint64_t budget) : shared_(shared), budget_(budget) {}
  void tick() {
    if (budget_ == 0) return;
    if (++local_ == 4096) flush();
  }
  void flush() {
    if (budget_ == 0 || local_ == 0) return;
    const auto total = shared_->fetch_add(local_) + local_;
    local_ = 0;
    if (total > budget_) throw BudgetExceeded("matching enumeration exceeded its node budget");
  }

 private:
  std::atomic<std::uint64_t>* shared_;
  std::uint64_t budget_;
  std::uint64_t local_ = 0;
};

/// Include/exclude search over edges in canonical order. Every set is
/// reached from the set missing its largest edge, so sets are visited once
/// and in lexicographic order of their sorted edge lists.
class MatchingDfs {
 public:
  MatchingDfs(const HasseDiagram& h, MatchingMode mode, NodeMeter meter)
      : h_(h), mode_(mode), state_(h), meter_(meter) {}

  FVector counts;
  std::vector<EdgeIndex> stack;

  bool try_push(EdgeIndex e) {
    if (!state_.is_free(e)) return false;
    if (mode_ == MatchingMode::acyclic && state_.creates_cycle(e)) return false;
    state_.add(e);
    stack.push_back(e);
    return true;
  }

  void pop() {
    state_.remove(stack.back());
    stack.pop_back();
  }

  template <class Visit>
  void run(EdgeIndex start, Visit& visit, std::size_t depth_limit = 0, std::vector<std::vector<EdgeIndex>>* cut = nullptr) {
    const auto n = EdgeIndex(h_.edge_count());
    for (EdgeIndex e = start; e < n; ++e) {
      if (!try_push(e)) continue;
      meter_.tick();
      bump(counts, stack.size());
      visit(std::span<const EdgeIndex>(stack));
      if (cut && stack.size() == depth_limit) cut->push_back(stack);
      else run(e + 1, visit, depth_limit, cut);
      pop();
    }
  }

  void finish() { meter_.flush(); }

 private:
  const HasseDiagram& h_;
  MatchingMode mode_;
  MatchingState state_;
  NodeMeter meter_;
};

}  // namespace detail

/// Visits every non-empty matching (acyclic ones only in acyclic mode)
/// exactly once, in lexicographic order of the sorted edge lists, and returns
/// the counts by cardinality. The visitor receives the sorted edge indices.
template <class Visitor>
FVector for_each_matching(const HasseDiagram& h, MatchingMode mode, Visitor&& visit, const EnumerationOptions& opts = {}) {
  std::atomic<std::uint64_t> nodes{0};
  detail::MatchingDfs dfs(h, mode, detail::NodeMeter(&nodes, opts.node_budget));
  dfs.run(0, visit);
  dfs.finish();
  return dfs.counts;
}

template <class Visitor>
FVector enumerate_matchings(const HasseDiagram& h, MatchingMode mode, Visitor&& visit, const EnumerationOptions& opts = {}) {
  return for_each_matching(h, mode, std::forward<Visitor>(visit), opts);
}

/// Streaming count, parallel over prefix subtrees. Per-subtree results are
/// summed in subtree order, so the totals do not depend on `threads`.
inline FVector count_matchings(const HasseDiagram& h, MatchingMode mode, const EnumerationOptions& opts = {}) {
  auto ignore = [](std::span<const EdgeIndex>) {};
  if (opts.threads <= 1 || opts.split_depth == 0) return for_each_matching(h, mode, ignore, opts);

  std::atomic<std::uint64_t> nodes{0};
  std::vector<std::vector<EdgeIndex>> prefixes;
  detail::MatchingDfs head(h, mode, detail::NodeMeter(&nodes, opts.node_budget));
  head.run(0, ignore, opts.split_depth, &prefixes);
  head.finish();

  std::vector<FVector> partial(prefixes.size());
  detail::parallel_for(prefixes.size(), opts.threads, [&](std::size_t i) {
    detail::MatchingDfs worker(h, mode, detail::NodeMeter(&nodes, opts.node_budget));
    for (EdgeIndex e : prefixes[i])
      if (!worker.try_push(e)) throw std::logic_error("prefix replay failed");
    worker.run(prefixes[i].back() + 1, ignore);
    worker.finish();
    partial[i] = std::move(worker.counts);
  });
  FVector total = head.counts;
  for (const auto& p : partial) detail::accumulate(total, p);
  return total;
}

/// Same counts as count_matchings, computed by dynamic programming over the
/// cover layers. A matching is acyclic iff each layer's part is, and layers
/// p-1 and p interact only through the p-faces they use, so the state after
/// layer p is the set of (p+1)-faces already matched from below.
///
/// Feasible when every dimension has at most `max_layer_faces` faces.
inline FVector count_matchings_layered(const HasseDiagram& h, MatchingMode mode, std::size_t max_layer_faces = 22) {
  const auto& K = h.complex();
  const int layers = h.layer_count();
  if (layers <= 0) return {};
  for (int d = 0; d <= K.dimension(); ++d)
    if (K.face_count(d) > max_layer_faces)
      throw ResourceLimitExceeded("dimension " + std::to_string(d) + " has too many faces for layered counting");

  using Poly = std::vector<std::uint64_t>;  // coefficient k = number of pairs
  auto add_scaled = [](Poly& into, const Poly& from, std::uint64_t scale, std::size_t shift) {
    if (into.size() < from.size() + shift) into.resize(from.size() + shift, 0);
    for (std::size_t k = 0; k < from.size(); ++k) {
      if (from[k] == 0) continue;
      std::uint64_t term;
      if (__builtin_mul_overflow(from[k], scale, &term)) throw ArithmeticOverflow("layered count overflow");
      into[k + shift] = checked_add(into[k + shift], term);
    }
  };

  // dp[mask of p-faces matched from below] -> polynomial
  std::vector<Poly> dp(std::size_t(1) << K.face_count(0));
  dp[0] = Poly{1};

  MatchingState state(h);
  for (int p = 0; p < layers; ++p) {
    const std::size_t n_low = K.face_count(p), n_up = K.face_count(p + 1);
    const FaceId low0 = h.face_id(p, 0), up0 = h.face_id(p + 1, 0);

    // Zeta transform: sum over subsets.
    std::vector<Poly> below = dp;
    for (std::size_t bit = 0; bit < n_low; ++bit)
      for (std::size_t mask = 0; mask < below.size(); ++mask)
        if (mask & (std::size_t(1) << bit)) add_scaled(below[mask], below[mask ^ (std::size_t(1) << bit)], 1, 0);

    // Layer-local matchings grouped by (lower set, upper set).
    std::unordered_map<std::uint64_t, std::uint64_t> groups;
    const EdgeIndex first = h.layer_begin(p), last = h.layer_begin(p + 1);
    std::uint64_t lo_mask = 0, up_mask = 0;
    auto rec = [&](auto&& self, EdgeIndex start) -> void {
      for (EdgeIndex e = start; e < last; ++e) {
        if (!state.is_free(e)) continue;
        if (mode == MatchingMode::acyclic && state.creates_cycle(e)) continue;
        const auto& ed = h.edge(e);
        state.add(e);
        lo_mask ^= std::uint64_t(1) << (ed.lower - low0);
        up_mask ^= std::uint64_t(1) << (ed.upper - up0);
        auto& g = groups[(lo_mask << 32) | up_mask];
        g = checked_add(g, std::uint64_t{1});
        self(self, e + 1);
        lo_mask ^= std::uint64_t(1) << (ed.lower - low0);
        up_mask ^= std::uint64_t(1) << (ed.upper - up0);
        state.remove(e);
      }
    };
    rec(rec, first);

    const std::size_t full_low = (std::size_t(1) << n_low) - 1;
    std::vector<Poly> next(std::size_t(1) << n_up);
    add_scaled(next[0], below[full_low], 1, 0);  // layer p left empty
    for (const auto& [key, count] : groups) {
      const std::size_t lower_set = std::size_t(key >> 32), upper_set = std::size_t(key & 0xffffffffu);
      add_scaled(next[upper_set], below[full_low & ~lower_set], count, std::size_t(std::popcount(lower_set)));
    }
    dp = std::move(next);
  }

  Poly total;
  for (const auto& poly : dp) add_scaled(total, poly, 1, 0);
  FVector f;
  for (std::size_t k = 1; k < total.size(); ++k) f.push_back(total[k]);
  while (!f.empty() && f.back() == 0) f.pop_back();
  return f;
}

}  // namespace morsematch
