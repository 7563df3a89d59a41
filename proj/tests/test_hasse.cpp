#include <catch_amalgamated.hpp>

#include <random>

#include "morsematch/hasse.hpp"
#include "oracles.hpp"

using namespace morsematch;

TEST_CASE("Hasse diagram of a triangle", "[hasse]") {
  HasseDiagram h(build_simplex(2));
  CHECK(h.face_count() == 7);
  CHECK(h.edge_count() == 9);
  CHECK(h.layer_count() == 2);
  CHECK(h.layer_begin(1) == 6);
  CHECK(h.edge_label(0) == "({0},{0,1})");
  for (EdgeIndex e = 1; e < h.edge_count(); ++e) {
    const auto a = h.edge(e - 1), b = h.edge(e);
    CHECK(std::tie(a.dim, a.lower, a.upper) < std::tie(b.dim, b.lower, b.upper));
  }
  const Simplex lo{1}, up{1, 2};
  const auto e = h.find_edge(lo, up);
  REQUIRE(e.has_value());
  CHECK(h.edge_label(*e) == "({1},{1,2})");
  CHECK_FALSE(h.find_edge(Simplex{0}, Simplex{1, 2}).has_value());
  CHECK(build_hasse(build_simplex(2)).edge_count() == 9);
}

TEST_CASE("matching and acyclicity agree with the Kahn oracle", "[hasse][property]") {
  std::mt19937_64 rng(7);
  for (auto k : {build_simplex(2), build_boundary(3), build_simplex(3), skeleton(build_simplex(4), 2)}) {
    HasseDiagram h(k);
    for (int trial = 0; trial < 400; ++trial) {
      // Random subsets of edges, biased towards small ones.
      std::vector<EdgeIndex> s;
      for (EdgeIndex e = 0; e < h.edge_count(); ++e)
        if (rng() % 5 == 0) s.push_back(e);
      const bool matching = oracle::pairwise_disjoint(h, s);
      REQUIRE(is_matching(h, s) == matching);
      if (matching) REQUIRE(is_acyclic(h, s) == oracle::kahn_acyclic(h, s));
      else REQUIRE_THROWS_AS(is_acyclic(h, s), std::invalid_argument);
    }
  }
}

TEST_CASE("a 2-cycle in the triangle is rejected", "[hasse]") {
  HasseDiagram h(build_boundary(2));
  // (0, 01), (1, 12), (2, 02) closes a gradient path.
  std::vector<EdgeIndex> m{*h.find_edge(Simplex{0}, Simplex{0, 1}), *h.find_edge(Simplex{1}, Simplex{1, 2}),
                           *h.find_edge(Simplex{2}, Simplex{0, 2})};
  std::sort(m.begin(), m.end());
  CHECK(is_matching(h, m));
  CHECK_FALSE(is_acyclic(h, m));
  m.pop_back();
  CHECK(is_acyclic(h, m));
}

TEST_CASE("acyclic matchings are hereditary", "[hasse][property]") {
  std::mt19937_64 rng(11);
  HasseDiagram h(build_simplex(3));
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = oracle::random_matching(h, rng, true);
    REQUIRE(is_acyclic(h, m));
    for (std::size_t drop = 0; drop < m.size(); ++drop) {
      auto sub = m;
      sub.erase(sub.begin() + long(drop));
      REQUIRE(is_acyclic(h, sub));
    }
  }
}

TEST_CASE("critical faces complement the matched ones", "[hasse]") {
  std::mt19937_64 rng(3);
  HasseDiagram h(build_simplex(3));
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = oracle::random_matching(h, rng, false);
    const auto r = critical_faces(h, m);
    CHECK(r.total() + 2 * m.size() == h.face_count());
    const auto layers = pairs_per_layer(h, m);
    std::uint64_t sum = 0;
    for (auto x : layers) sum += x;
    CHECK(sum == m.size());
  }
  CHECK_THROWS_AS(critical_faces(h, std::vector<EdgeIndex>{0, 1}), std::invalid_argument);
}

TEST_CASE("edge indices are range checked", "[hasse]") {
  HasseDiagram h(build_simplex(1));
  CHECK_THROWS_AS(is_matching(h, std::vector<EdgeIndex>{5}), std::out_of_range);
}
