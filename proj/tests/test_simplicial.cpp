#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "morsematch/complex_spec.hpp"
#include "morsematch/isomorphism.hpp"
#include "morsematch/simplicial_complex.hpp"

using namespace morsematch;

namespace {

std::uint64_t choose(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * std::uint64_t(n - k + i) / std::uint64_t(i);
  return r;
}

// Every face of every dimension has all its codimension-one faces present.
bool closed_downward(const SimplicialComplex& k) {
  for (int d = 1; d <= k.dimension(); ++d)
    for (std::size_t i = 0; i < k.face_count(d); ++i) {
      auto f = k.simplex(d, i);
      for (std::size_t j = 0; j < f.size(); ++j) {
        Simplex g = f;
        g.erase(g.begin() + long(j));
        if (!k.contains(g)) return false;
      }
    }
  return true;
}

}  // namespace

TEST_CASE("simplex f-vectors are binomial rows", "[simplicial]") {
  for (int n = 0; n <= 6; ++n) {
    const auto k = build_simplex(n);
    REQUIRE(k.dimension() == n);
    for (int d = 0; d <= n; ++d) CHECK(k.face_count(d) == choose(n + 1, d + 1));
    CHECK(k.euler_characteristic() == 1);
    CHECK(closed_downward(k));
  }
}

TEST_CASE("boundary of a simplex drops only the top face", "[simplicial]") {
  for (int n = 1; n <= 6; ++n) {
    const auto b = build_boundary(n);
    REQUIRE(b.dimension() == n - 1);
    CHECK(b.euler_characteristic() == (n % 2 ? 2 : 0));
    CHECK(b.is_subcomplex_of(build_simplex(n)));
    CHECK(b.facets().size() == std::size_t(n + 1));
  }
  CHECK_THROWS_AS(build_boundary(0), std::invalid_argument);
}

TEST_CASE("skeleton keeps faces up to k", "[simplicial]") {
  const auto s = skeleton(build_simplex(4), 2);
  CHECK(s.f_vector() == std::vector<std::uint64_t>{5, 10, 10});
  CHECK(closed_downward(s));
}

TEST_CASE("cone adds a fresh apex", "[simplicial]") {
  const auto k = build_boundary(2);
  const auto c = cone(k);
  CHECK(c.apex == 3);
  CHECK(c.complex.f_vector() == std::vector<std::uint64_t>{4, 6, 3});
  CHECK(c.complex.euler_characteristic() == 1);
  CHECK(cone(build_simplex(2)).complex == build_simplex(3));
}

TEST_CASE("star and link of a vertex in the boundary of a tetrahedron", "[simplicial]") {
  const auto b = build_boundary(3);
  const Simplex v{0};
  const auto sl = star_link(b, v);
  CHECK(sl.star.size() == 7);  // vertex, 3 edges, 3 triangles
  CHECK(sl.link.f_vector() == std::vector<std::uint64_t>{3, 3});
  CHECK(sl.link_vertices == std::vector<VertexId>{1, 2, 3});
}

TEST_CASE("full subcomplex test", "[simplicial]") {
  const auto k = build_boundary(2);
  CHECK(is_full_subcomplex(k, {{0}, {1}, {0, 1}}));
  CHECK_FALSE(is_full_subcomplex(k, {{0}, {1}}));
}

TEST_CASE("isomorphism finds relabellings and rejects non-isomorphic pairs", "[simplicial]") {
  const auto a = SimplicialComplex::from_facets(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto b = SimplicialComplex::from_facets(4, {{0, 2}, {0, 3}, {1, 3}});
  const auto map = is_isomorphic(a, b);
  REQUIRE(map.has_value());
  for (const auto& f : a.facets()) {
    Simplex g;
    for (VertexId v : f) g.push_back((*map)[v]);
    std::sort(g.begin(), g.end());
    CHECK(b.contains(g));
  }
  const auto star = SimplicialComplex::from_facets(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK_FALSE(is_isomorphic(a, star).has_value());
}

TEST_CASE("from_facets validates input", "[simplicial]") {
  CHECK_THROWS_AS(SimplicialComplex::from_facets(2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(SimplicialComplex::from_facets(3, {{1, 0}}), std::invalid_argument);
}

TEST_CASE("complex expressions parse and round-trip", "[spec]") {
  CHECK(parse_complex_spec("skeleton:simplex:4:2").canonical() == "skeleton:simplex:4:2");
  CHECK(parse_complex_spec("cone:boundary:2").canonical() == "cone:boundary:2");
  CHECK(build_complex("cone:simplex:2") == build_simplex(3));
  CHECK(build_complex("skeleton:simplex:3:1").f_vector() == std::vector<std::uint64_t>{4, 6});
  CHECK_THROWS_AS(parse_complex_spec("simplex"), SpecError);
  CHECK_THROWS_AS(parse_complex_spec("sphere:2"), SpecError);
  CHECK_THROWS_AS(parse_complex_spec("simplex:-1"), SpecError);
  CHECK_THROWS_AS(parse_complex_spec("boundary:0"), SpecError);
  CHECK(build_complex("skeleton:simplex:2:3") == build_simplex(2));
}

TEST_CASE("facet files load with downward closure and reject bad ids", "[spec]") {
  const auto dir = std::filesystem::temp_directory_path() / "morsematch-spec-test";
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return "file:" + (dir / name).string();
  };
  const auto k = build_complex(write("ok.json", R"({"vertices": 4, "facets": [[0,1,2],[2,3]]})"));
  CHECK(k.f_vector() == std::vector<std::uint64_t>{4, 4, 1});
  CHECK(closed_downward(k));
  CHECK_THROWS_AS(build_complex(write("unsorted.json", R"({"vertices": 3, "facets": [[1,0]]})")), SpecError);
  CHECK_THROWS_AS(build_complex(write("range.json", R"({"vertices": 2, "facets": [[0,5]]})")), SpecError);
  CHECK_THROWS_AS(build_complex(write("garbage.json", "{nope")), SpecError);
  CHECK_THROWS_AS(build_complex("file:" + (dir / "missing.json").string()), SpecError);
  CHECK(complex_from_json(complex_to_json(k)) == k);
}
