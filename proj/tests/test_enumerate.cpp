#include <catch_amalgamated.hpp>

#include "morsematch/enumerate.hpp"
#include "morsematch/optimal.hpp"
#include "oracles.hpp"

using namespace morsematch;

namespace {
const std::vector<std::pair<std::string, SimplicialComplex>>& small_complexes() {
  static const std::vector<std::pair<std::string, SimplicialComplex>> v{
      {"simplex:1", build_simplex(1)},
      {"simplex:2", build_simplex(2)},
      {"boundary:2", build_boundary(2)},
      {"boundary:3", build_boundary(3)},
      {"skeleton:simplex:3:1", skeleton(build_simplex(3), 1)},
      {"cone:boundary:2", cone(build_boundary(2)).complex},
      {"two triangles", SimplicialComplex::from_facets(4, {{0, 1, 2}, {1, 2, 3}})},
  };
  return v;
}
}  // namespace

TEST_CASE("streaming counts match brute force over edge subsets", "[enumerate][oracle]") {
  for (const auto& [name, k] : small_complexes()) {
    INFO(name);
    HasseDiagram h(k);
    for (auto mode : {MatchingMode::acyclic, MatchingMode::all}) {
      const auto want = oracle::subset_fvector(h, mode == MatchingMode::acyclic);
      CHECK(count_matchings(h, mode) == want);
      CHECK(count_matchings_layered(h, mode) == want);
    }
  }
}

TEST_CASE("layered counts agree with depth-first counts on larger bases", "[enumerate]") {
  for (auto k : {build_simplex(3), skeleton(build_simplex(4), 1)}) {
    HasseDiagram h(k);
    for (auto mode : {MatchingMode::acyclic, MatchingMode::all}) CHECK(count_matchings_layered(h, mode) == count_matchings(h, mode));
  }
}

TEST_CASE("visitor sees each acyclic matching once in lexicographic order", "[enumerate]") {
  HasseDiagram h(build_boundary(3));
  std::vector<std::vector<EdgeIndex>> seen;
  const auto f = for_each_matching(h, MatchingMode::acyclic, [&](std::span<const EdgeIndex> m) {
    seen.emplace_back(m.begin(), m.end());
  });
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  std::uint64_t total = 0;
  for (auto x : f) total += x;
  CHECK(total == seen.size());
  for (const auto& m : seen) REQUIRE(oracle::kahn_acyclic(h, m));
}

TEST_CASE("counts do not depend on the thread count", "[enumerate][property]") {
  HasseDiagram h(build_simplex(3));
  const auto one = count_matchings(h, MatchingMode::acyclic);
  for (unsigned t : {2u, 3u, 8u}) {
    EnumerationOptions o;
    o.threads = t;
    o.split_depth = 2;
    CHECK(count_matchings(h, MatchingMode::acyclic, o) == one);
  }
}

TEST_CASE("node budget aborts enumeration", "[enumerate]") {
  HasseDiagram h(build_simplex(3));
  EnumerationOptions o;
  o.node_budget = 1000;
  CHECK_THROWS_AS(count_matchings(h, MatchingMode::acyclic, o), BudgetExceeded);
}

TEST_CASE("layered counting refuses very wide layers", "[enumerate]") {
  HasseDiagram h(build_simplex(6));
  CHECK_THROWS_AS(count_matchings_layered(h, MatchingMode::acyclic), ResourceLimitExceeded);
}

TEST_CASE("optimal matchings of small simplices", "[optimal]") {
  struct Row {
    SimplicialComplex k;
    std::size_t card;
    std::uint64_t count;
  };
  for (const auto& [k, card, count] : {Row{build_simplex(1), 1, 2}, Row{build_simplex(2), 3, 9}, Row{build_simplex(3), 7, 256},
                                       Row{skeleton(build_simplex(3), 1), 3, 64}}) {
    HasseDiagram h(k);
    const auto s = count_optimal(h);
    CHECK(s.max_cardinality == card);
    CHECK(s.count == count);
  }
}

TEST_CASE("optimal matchings are the largest acyclic matchings", "[optimal][oracle]") {
  for (const auto& [name, k] : small_complexes()) {
    INFO(name);
    HasseDiagram h(k);
    const auto f = oracle::subset_fvector(h, true);
    const auto s = count_optimal(h);
    CHECK(s.max_cardinality == f.size());
    CHECK(s.count == f.back());
    CHECK(s.critical_count == h.face_count() - 2 * f.size());
    for (const auto& m : optimal_matchings(h)) {
      CHECK(m.cardinality() == f.size());
      CHECK(oracle::kahn_acyclic(h, m.edges()));
    }
  }
}

TEST_CASE("optimal enumeration order does not depend on threads", "[optimal][property]") {
  HasseDiagram h(build_simplex(3));
  auto collect = [&](unsigned threads) {
    std::vector<std::vector<EdgeIndex>> out;
    OptimalOptions o;
    o.threads = threads;
    o.split_depth = 4;
    enumerate_optimal(h, [&](std::span<const EdgeIndex> m) { out.emplace_back(m.begin(), m.end()); }, o);
    return out;
  };
  const auto one = collect(1);
  CHECK(one.size() == 256);
  CHECK(collect(2) == one);
  CHECK(collect(4) == one);
}

TEST_CASE("optimal search honours the node budget", "[optimal]") {
  HasseDiagram h(build_simplex(3));
  OptimalOptions o;
  o.node_budget = 50;
  CHECK_THROWS_AS(count_optimal(h, o), BudgetExceeded);
}

TEST_CASE("complex without edges has the empty optimal matching", "[optimal]") {
  HasseDiagram h(build_simplex(0));
  const auto s = count_optimal(h);
  CHECK(s.max_cardinality == 0);
  CHECK(s.critical_count == 1);
}
