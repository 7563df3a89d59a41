// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "morsematch/enumerate.hpp"
#include "morsematch/homology.hpp"
#include "morsematch/matching_complex.hpp"
#include "morsematch/optimal.hpp"
#include "morsematch/verify.hpp"
#include "oracles.hpp"

using namespace morsematch;
using FV = std::vector<std::uint64_t>;

namespace {

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Criterion {
  std::ostringstream notes;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
  void report(const VerificationReport& r) {
    expect(r.status == CheckStatus::pass, r.name + " " + r.params.dump() + " -> " + to_string(r.status) + " " +
                                              r.details.value("reason", std::string{}));
  }
};

bool only_degree(const HomologyResult& h, int d, std::uint64_t betti) {
  return h.torsion_free() && h.support() == std::vector<int>{d} && h.betti(d) == betti;
}

void criterion_1(Criterion& c) {
  struct Row {
    const char* label;
    SimplicialComplex k;
    Variant v;
    FV f;
    std::int64_t chi;
  };
  const std::vector<Row> rows{
      {"M(simplex 3)", build_simplex(3), Variant::M, {28, 300, 1544, 3932, 4632, 2128, 256}, 100},
      {"M(boundary 3)", build_boundary(3), Variant::M, {24, 216, 896, 1692, 1248, 256}, 4},
      {"MP(simplex 3)", build_simplex(3), Variant::MP, {28, 300, 1544, 3680, 3672, 1600, 256}, -80},
      {"MP(boundary 3)", build_boundary(3), Variant::MP, {24, 216, 896, 1680, 1152, 256}, -80},
  };
  for (const auto& r : rows) {
    const auto mc = build_matching_complex(r.k, r.v);
    const auto chi = mc.complex.euler_characteristic();
    c.notes << ' ' << r.label << " chi=" << chi;
    c.expect(chi == r.chi, std::string(r.label) + " Euler characteristic");
    c.expect(mc.complex.f_vector() == r.f, std::string(r.label) + " f-vector");
  }
}

void criterion_2(Criterion& c) {
  HomologyOptions ho;
  ho.threads = worker_threads();
  const auto m3 = homology(build_matching_complex(build_simplex(3), Variant::M).complex, true, ho);
  const auto mb = homology(build_matching_complex(build_boundary(3), Variant::M).complex, true, ho);
  const auto p3 = homology(build_matching_complex(build_simplex(3), Variant::MP).complex, true, ho);
  const auto pb = homology(build_matching_complex(build_boundary(3), Variant::MP).complex, true, ho);
  c.expect(only_degree(m3, 4, 99), "H~(M(simplex 3)) = Z^99 in degree 4");
  c.expect(mb.torsion_free() && mb.support() == std::vector<int>{3, 4} && mb.betti(3) == 21 && mb.betti(4) == 24,
           "H~(M(boundary 3)) = Z^21, Z^24 in degrees 3, 4");
  c.expect(only_degree(p3, 3, 81), "H~(MP(simplex 3)) = Z^81 in degree 3");
  c.expect(only_degree(pb, 3, 81), "H~(MP(boundary 3)) = Z^81 in degree 3");
  c.notes << " H4(M)=" << m3.betti(4) << " H3,H4(M bd)=" << mb.betti(3) << ',' << mb.betti(4) << " H3(MP)=" << p3.betti(3)
          << ',' << pb.betti(3);
}

void criterion_3(Criterion& c) {
  const std::vector<std::uint64_t> want{2, 9, 256};
  for (int n = 1; n <= 3; ++n) {
    const auto s = count_optimal(HasseDiagram(build_simplex(n)));
    c.notes << " f(" << n << ")=" << s.count;
    c.expect(s.count == want[std::size_t(n) - 1], "f(" + std::to_string(n) + ")");
  }
  const auto sk = count_optimal(HasseDiagram(skeleton(build_simplex(3), 1)));
  c.expect(sk.count == 64, "64 optimal matchings on the 1-skeleton of the 3-simplex");
  const auto st = verify_spanning_tree(3);
  c.report(st);
  c.expect(st.details.value("distinct_trees", 0) == 16, "16 distinct spanning trees");
  c.notes << " skeleton=" << sk.count << " trees=" << st.details.value("distinct_trees", 0);
}

void criterion_4(Criterion& c) {
  VerifyOptions o;
  o.threads = worker_threads();
  const auto bij = verify_top_facet_bijection(3, o);
  c.report(bij);
  c.expect(bij.details.value("optimal_simplex", 0) == 256, "bijection over 256 matchings");
  const auto layers = verify_layer_counts(3, o);
  c.report(layers);
  c.expect(layers.details.value("layer_counts", json()) == json::array({3, 3, 1}), "layer counts (3, 3, 1)");
  c.report(verify_spanning_tree(3, o));
  const auto fib = verify_restriction_fibers(3, o);
  c.report(fib);
  c.expect(fib.details.value("optimal_simplex", 0) == 256 && fib.details.value("optimal_skeleton", 0) == 64,
           "256 = 4 x 64");
  c.notes << " bijection, layers (3,3,1), trees, fibres of size 4";
}

void criterion_5(Criterion& c) {
  for (const char* s : {"simplex:1", "boundary:2", "simplex:2"}) {
    const auto r = verify_cone_contiguity(s, build_complex(s), 0);
    c.report(r);
    c.notes << ' ' << s << ':' << r.details.value("faces_checked", 0) << " faces";
  }
}

void criterion_6(Criterion& c) {
  const auto les = verify_les_example();
  c.report(les);
  const auto split = verify_pair_splitting("simplex:3", build_simplex(3), "simplex:2", build_simplex(2));
  c.report(split);
  c.notes << " rel H4=" << les.details["ranks"].value("rel4", -1) << " H5=" << les.details["ranks"].value("rel5", -1)
          << " alt=" << les.details.value("alternating_sum", -1);
}

void criterion_7(Criterion& c) {
  HomologyOptions ho;
  ho.threads = worker_threads();
  const auto a = homology(build_matching_complex(build_simplex(3), Variant::GM).complex, true, ho);
  const auto b = homology(build_matching_complex(build_boundary(3), Variant::GM).complex, true, ho);
  c.expect(only_degree(a, 4, 39), "H~(GM(simplex 3)) = Z^39 in degree 4");
  c.expect(only_degree(b, 4, 39), "H~(GM(boundary 3)) = Z^39 in degree 4");
  c.report(verify_gm_structure(3));
  c.report(verify_gm_structure(2));
  c.notes << " H4(GM)=" << a.betti(4) << ',' << b.betti(4) << " covering, links and trees checked";
}

void criterion_8(Criterion& c) {
  OptimalOptions oo;
  oo.threads = worker_threads();
  const auto sk = count_optimal(HasseDiagram(skeleton(build_simplex(4), 2)), oo);
  const auto full = count_optimal(HasseDiagram(build_simplex(4)), oo);
  c.expect(sk.count == 76025, "76,025 on the 2-skeleton of the 4-simplex");
  c.expect(full.count == 380125, "380,125 on the 4-simplex");
  c.expect(full.count == 5 * sk.count, "380,125 = 5 x 76,025");
  VerifyOptions o;
  o.threads = worker_threads();
  o.max_n = 4;
  const auto fib = verify_restriction_fibers(4, o);
  c.report(fib);
  const auto layers = verify_layer_counts(4, o);
  c.report(layers);
  c.expect(layers.details.value("layer_counts", json()) == json::array({4, 6, 4, 1}), "layer counts (4, 6, 4, 1)");
  c.notes << " skeleton=" << sk.count << " simplex=" << full.count;
}

void criterion_9(Criterion& c) {
  const auto f = count_matchings_layered(HasseDiagram(build_simplex(4)), MatchingMode::acyclic);
  const auto chi = alternating_sum(f);
  c.expect(f == reference_fvector_m_simplex4(), "15-entry f-vector");
  c.expect(chi == 212457 && chi - 1 == 212456, "chi = 212,457");
  VerifyOptions o;
  o.allow_long = true;
  c.report(verify_euler_obstruction_n4(o));
  c.notes << " computed f-vector, chi=" << chi;
}

void criterion_10(Criterion& c) {
  std::mt19937_64 rng(10);
  std::size_t complexes = 0, matrices = 0, matchings = 0;
  HomologyOptions h1, h4;
  h4.threads = 4;
  for (auto [k, v] : std::vector<std::pair<SimplicialComplex, Variant>>{{build_simplex(2), Variant::M},
                                                                         {build_boundary(3), Variant::M},
                                                                         {build_boundary(3), Variant::GM},
                                                                         {build_simplex(3), Variant::MP},
                                                                         {cone(build_boundary(2)).complex, Variant::M}}) {
    const auto mc = build_matching_complex(k, v);
    // Downward closure and heredity.
    c.expect(mc.complex.has_downward_closure(), "downward closure");
    for (int d = 0; d <= mc.complex.dimension(); ++d)
      for (std::size_t i = 0; i < mc.complex.face_count(d); ++i) {
        const auto m = mc.edges_of(d, i);
        if (!oracle::pairwise_disjoint(*mc.hasse, m) || (v != Variant::GM && !oracle::kahn_acyclic(*mc.hasse, m))) {
          c.expect(false, "faces are (acyclic) matchings");
          d = mc.complex.dimension() + 1;
          break;
        }
      }
    // Chain complex and Euler-Betti consistency (homology() also asserts it).
    c.expect(is_chain_complex(boundary_matrices(mc.complex, true)), "boundary of boundary is zero");
    const auto a = homology(mc.complex, true, h1), b = homology(mc.complex, true, h4);
    c.expect(a.alternating_betti_sum() == mc.complex.euler_characteristic() - 1, "Euler-Betti consistency");
    c.expect(a.groups == b.groups, "determinism under thread counts");
    ++complexes;
  }
  // Smith normal form against a textbook dense reduction.
  for (int t = 0; t < 200; ++t, ++matrices) {
    const std::size_t r = 1 + rng() % 12, cols = 1 + rng() % 12;
    std::vector<std::vector<long long>> dense(r, std::vector<long long>(cols, 0));
    SparseIntMatrix m(r, cols);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (rng() % 2) {
          dense[i][j] = (long long)(rng() % 7) - 3;
          if (dense[i][j]) m.add(i, j, dense[i][j]);
        }
    std::vector<long long> got;
    for (const auto& d : smith_normal_form(m).divisors) got.push_back(d.convert_to<long long>());
    if (got != oracle::textbook_snf(dense)) c.expect(false, "SNF oracle on matrix " + std::to_string(t));
  }
  // Weak Morse inequalities on sampled acyclic matchings.
  for (auto k : {build_simplex(3), build_boundary(3), skeleton(build_simplex(4), 2)}) {
    const auto h = homology(k, false);
    HasseDiagram hd(k);
    for (int t = 0; t < 50; ++t, ++matchings) {
      const auto crit = critical_faces(hd, oracle::random_matching(hd, rng, true));
      for (int d = 0; d <= k.dimension(); ++d)
        if (crit.counts[std::size_t(d)] < h.betti(d)) c.expect(false, "weak Morse inequality");
    }
  }
  // Thread determinism of counts and optimal enumeration.
  HasseDiagram h3(build_simplex(3));
  EnumerationOptions e4;
  e4.threads = 4;
  c.expect(count_matchings(h3, MatchingMode::acyclic) == count_matchings(h3, MatchingMode::acyclic, e4),
           "count determinism under threads");
  OptimalOptions o1, o4;
  o4.threads = 4;
  c.expect(optimal_matchings(h3, o1) == optimal_matchings(h3, o4), "optimal order determinism under threads");
  c.notes << ' ' << complexes << " complexes, " << matrices << " SNF matrices, " << matchings << " sampled matchings";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> criteria{
      {"reference f-vectors and Euler characteristics for n <= 3", criterion_1},
      {"reference homology for n <= 3", criterion_2},
      {"optimal matching counts and spanning trees", criterion_3},
      {"theorem suite at n = 3", criterion_4},
      {"cone contiguity", criterion_5},
      {"long exact sequence example and cone-pair splitting", criterion_6},
      {"generalized matching complex suite", criterion_7},
      {"n = 4 optimal counts, fibres and layer counts", criterion_8},
      {"f-vector of M(simplex 4) and Euler obstruction", criterion_9},
      {"property suites", criterion_10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.notes << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << (i + 1) << ": " << (c.ok ? "PASS" : "FAIL") << " - " << criteria[i].first << " ("
              << std::fixed << std::setprecision(2) << secs << " s)" << c.notes.str() << std::endl;
    failures += !c.ok;
  }
  return failures == 0 ? 0 : 1;
}
