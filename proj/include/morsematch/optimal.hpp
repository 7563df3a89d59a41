#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "morsematch/enumerate.hpp"
#include "morsematch/errors.hpp"
#include "morsematch/hasse.hpp"
#include "morsematch/parallel.hpp"

namespace morsematch {

struct OptimalOptions {
  unsigned threads = 1;
  /// Decision depth at which subtrees are handed to workers.
  unsigned split_depth = 6;
  /// Maximum number of search nodes over all deepening rounds; 0 = unlimited.
  std::uint64_t node_budget = 0;
};

struct OptimalSummary {
  std::size_t max_cardinality = 0;
  std::uint64_t count = 0;
  /// Critical faces left by every optimal matching.
  std::size_t critical_count = 0;
};

namespace detail {

/// Exhaustive search over acyclic matchings with at most `budget` critical
/// faces. Faces are decided in FaceId order: a face that is still unmatched
/// when reached is either paired with a free coface or declared critical.
/// Every matching corresponds to exactly one decision path.
///
/// Bound: a face that is still undecided but has no undecided neighbour left
/// must end up critical, so `critical + doomed` never decreases along a path.
class OptimalSearch {
 public:
  static constexpr std::int32_t kCritical = -1;

  OptimalSearch(const HasseDiagram& h, std::size_t budget, NodeMeter meter)
      : h_(h), state_(h), budget_(budget), meter_(meter), avail_(h.face_count(), 1), open_(h.face_count(), 0) {
    for (FaceId f = 0; f < h.face_count(); ++f) {
      open_[f] = std::uint32_t(h.up_edges(f).size() + h.down_edges(f).size());
      if (open_[f] == 0) ++doomed_;
    }
  }

  std::uint64_t count = 0;
  std::vector<EdgeIndex> edges;
  std::vector<std::int32_t> decisions;

  struct Item {
    bool is_task;
    std::vector<std::int32_t> prefix;
    std::vector<EdgeIndex> solution;
  };

  bool feasible() const { return critical_ + doomed_ <= budget_; }

  void replay(std::span<const std::int32_t> prefix) {
    FaceId f = 0;
    for (std::int32_t d : prefix) {
      f = next_available(f);
      if (d == kCritical) apply_critical(f);
      else apply_match(EdgeIndex(d));
      ++f;
    }
    resume_ = f;
  }

  FaceId resume_point() const { return resume_; }

  template <class Visit>
  void run(FaceId from, Visit& visit, std::size_t depth_limit = 0, std::vector<Item>* items = nullptr) {
    const FaceId f = next_available(from);
    if (f == h_.face_count()) {
      count = checked_add(count, std::uint64_t{1});
      if (items) items->push_back({false, {}, edges});
      else visit(std::span<const EdgeIndex>(edges));
      return;
    }
    if (items && decisions.size() == depth_limit) {
      items->push_back({true, decisions, {}});
      return;
    }
    meter_.tick();
    for (EdgeIndex e : h_.up_edges(f)) {
      if (!avail_[h_.edges()[e].upper] || state_.creates_cycle(e)) continue;
      apply_match(e);
      if (feasible()) run(f + 1, visit, depth_limit, items);
      undo_match(e);
    }
    apply_critical(f);
    if (feasible()) run(f + 1, visit, depth_limit, items);
    undo_critical(f);
  }

  void finish() { meter_.flush(); }

 private:
  FaceId next_available(FaceId f) const {
    while (f < h_.face_count() && !avail_[f]) ++f;
    return f;
  }

  template <class Fn>
  void for_neighbours(FaceId x, Fn&& fn) const {
    for (EdgeIndex e : h_.up_edges(x)) fn(h_.edges()[e].upper);
    for (EdgeIndex e : h_.down_edges(x)) fn(h_.edges()[e].lower);
  }

  void retire(FaceId x) {
    avail_[x] = 0;
    if (open_[x] == 0) --doomed_;
    for_neighbours(x, [&](FaceId g) {
      if (--open_[g] == 0 && avail_[g]) ++doomed_;
    });
  }

  void restore(FaceId x) {
    for_neighbours(x, [&](FaceId g) {
      if (open_[g]++ == 0 && avail_[g]) --doomed_;
    });
    avail_[x] = 1;
    if (open_[x] == 0) ++doomed_;
  }

  void apply_match(EdgeIndex e) {
    const auto& ed = h_.edges()[e];
    state_.add(e);
    retire(ed.lower);
    retire(ed.upper);
    edges.push_back(e);
    decisions.push_back(std::int32_t(e));
  }

  void undo_match(EdgeIndex e) {
    const auto& ed = h_.edges()[e];
    decisions.pop_back();
    edges.pop_back();
    restore(ed.upper);
    restore(ed.lower);
    state_.remove(e);
  }

  void apply_critical(FaceId f) {
    retire(f);
    ++critical_;
    decisions.push_back(kCritical);
  }

  void undo_critical(FaceId f) {
    decisions.pop_back();
    --critical_;
    restore(f);
  }

  const HasseDiagram& h_;
  MatchingState state_;
  std::size_t budget_;
  NodeMeter meter_;
  std::vector<char> avail_;
  std::vector<std::uint32_t> open_;
  std::size_t doomed_ = 0;
  std::size_t critical_ = 0;
  FaceId resume_ = 0;
};

struct OptimalRound {
  std::uint64_t count = 0;
  std::vector<std::vector<EdgeIndex>> solutions;  // only filled when collecting
};

// One deepening round at a fixed critical budget.
template <class Visit>
OptimalRound optimal_round(const HasseDiagram& h, std::size_t budget, Visit& visit, bool collect,
                           const OptimalOptions& opts, std::atomic<std::uint64_t>& nodes) {
  OptimalRound out;
  if (opts.threads <= 1 || opts.split_depth == 0) {
    OptimalSearch s(h, budget, NodeMeter(&nodes, opts.node_budget));
    if (s.feasible()) {
      if (collect) {
        auto keep = [&](std::span<const EdgeIndex> m) { out.solutions.emplace_back(m.begin(), m.end()); };
        s.run(0, keep);
      } else {
        s.run(0, visit);
      }
    }
    s.finish();
    out.count = s.count;
    return out;
  }

  std::vector<OptimalSearch::Item> items;
  OptimalSearch head(h, budget, NodeMeter(&nodes, opts.node_budget));
  if (head.feasible()) head.run(0, visit, opts.split_depth, &items);
  head.finish();

  std::vector<OptimalRound> parts(items.size());
  parallel_for(items.size(), opts.threads, [&](std::size_t i) {
    if (!items[i].is_task) return;
    OptimalSearch w(h, budget, NodeMeter(&nodes, opts.node_budget));
    w.replay(items[i].prefix);
    auto keep = [&](std::span<const EdgeIndex> m) {
      if (collect) parts[i].solutions.emplace_back(m.begin(), m.end());
    };
    if (w.feasible()) w.run(w.resume_point(), keep);
    w.finish();
    parts[i].count = w.count;
  });
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].is_task) {
      out.count = checked_add(out.count, std::uint64_t{1});
      if (collect) out.solutions.push_back(std::move(items[i].solution));
      continue;
    }
    out.count = checked_add(out.count, parts[i].count);
    if (collect)
      for (auto& s : parts[i].solutions) out.solutions.push_back(std::move(s));
  }
  return out;
}

template <class Visit>
OptimalSummary optimal_impl(const HasseDiagram& h, Visit& visit, bool collect, std::vector<std::vector<EdgeIndex>>* sink,
                            const OptimalOptions& opts) {
  const std::size_t faces = h.face_count();
  if (h.edge_count() == 0) return {0, 0, faces};
  std::atomic<std::uint64_t> nodes{0};
  // Every acyclic matching leaves a critical vertex; the number of critical
  // faces has the parity of the face count.
  for (std::size_t b = (faces % 2 == 1) ? 1 : 2; b <= faces; b += 2) {
    auto round = optimal_round(h, b, visit, collect, opts, nodes);
    if (round.count == 0) continue;
    if (sink) *sink = std::move(round.solutions);
    return {(faces - b) / 2, round.count, b};
  }
  throw std::logic_error("no optimal matching found");
}

}  // namespace detail

/// Visits every maximum-cardinality acyclic matching once, as sorted edge
/// lists. With threads > 1 the matchings are buffered per subtree and then
/// replayed in the same order a single-threaded run produces.
template <class Visitor>
OptimalSummary enumerate_optimal(const HasseDiagram& h, Visitor&& visit, const OptimalOptions& opts = {}) {
  if (opts.threads <= 1) return detail::optimal_impl(h, visit, false, nullptr, opts);
  std::vector<std::vector<EdgeIndex>> all;
  auto ignore = [](std::span<const EdgeIndex>) {};
  auto summary = detail::optimal_impl(h, ignore, true, &all, opts);
  for (const auto& m : all) visit(std::span<const EdgeIndex>(m));
  return summary;
}

inline OptimalSummary count_optimal(const HasseDiagram& h, const OptimalOptions& opts = {}) {
  auto ignore = [](std::span<const EdgeIndex>) {};
  return detail::optimal_impl(h, ignore, false, nullptr, opts);
}

/// All optimal matchings, in enumeration order.
inline std::vector<Matching> optimal_matchings(const HasseDiagram& h, const OptimalOptions& opts = {}) {
  std::vector<Matching> out;
  enumerate_optimal(h, [&](std::span<const EdgeIndex> m) { out.emplace_back(std::vector<EdgeIndex>(m.begin(), m.end())); },
                    opts);
  return out;
}

}  // namespace morsematch
