#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "morsematch/cache.hpp"
#include "morsematch/complex_spec.hpp"
#include "morsematch/enumerate.hpp"
#include "morsematch/hasse.hpp"
#include "morsematch/homology.hpp"
#include "morsematch/isomorphism.hpp"
#include "morsematch/matching_complex.hpp"
#include "morsematch/optimal.hpp"
#include "morsematch/parallel.hpp"

namespace morsematch {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON helpers shared with the CLI

inline json bigint_json(const BigInt& v) {
  if (v <= BigInt(std::numeric_limits<std::int64_t>::max()) && v >= BigInt(std::numeric_limits<std::int64_t>::min()))
    return v.convert_to<std::int64_t>();
  return v.str();
}

inline json homology_json(const HomologyResult& h) {
  json groups = json::array();
  for (const auto& g : h.groups) {
    json t = json::array();
    for (const auto& d : g.torsion) t.push_back(bigint_json(d));
    groups.push_back({{"degree", g.degree}, {"betti", g.betti}, {"torsion", t}});
  }
  return {{"void", h.is_void}, {"reduced", h.reduced}, {"groups", groups}};
}

inline json matching_json(const HasseDiagram& h, std::span<const EdgeIndex> m) {
  json out = json::array();
  for (EdgeIndex e : m) out.push_back(h.edge_label(e));
  return out;
}

/// Prime-power decomposition of a torsion list, sorted. Two lists describe
/// isomorphic groups iff their decompositions agree.
inline std::vector<BigInt> canonical_torsion(const std::vector<BigInt>& divisors) {
  std::vector<BigInt> out;
  for (BigInt d : divisors) {
    if (d < 0) d = -d;
    for (BigInt p = 2; p * p <= d && p < 1'000'000; ++p) {
      if (d % p != 0) continue;
      BigInt q = 1;
      while (d % p == 0) {
        d /= p;
        q *= p;
      }
      out.push_back(q);
    }
    if (d > 1) out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Reference f-vector of M(Δ⁴) and its Euler characteristic, as published.
inline const std::vector<std::uint64_t>& reference_fvector_m_simplex4() {
  static const std::vector<std::uint64_t> v{75,        2485,      47955,     598425,    5071367,
                                            29844505,  122685075, 350017175, 680808105, 876110235,
                                            712961065, 343320335, 88467825,  10315975,  380125};
  return v;
}
inline constexpr std::int64_t kReferenceEulerMSimplex4 = 212457;

inline std::int64_t alternating_sum(const std::vector<std::uint64_t>& f) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i % 2 ? -1 : 1) * std::int64_t(f[i]);
  return s;
}

inline std::string fvector_cache_key(const std::string& spec, Variant v) {
  return cache_key(spec, to_string(v), "fvector");
}

// ---------------------------------------------------------------------------
// Reports

enum class CheckStatus { pass, fail, skipped_budget, evidence };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped_budget: return "skipped-budget";
    case CheckStatus::evidence: return "evidence";
  }
  return "?";
}

struct VerificationReport {
  std::string name;
  json params = json::object();
  CheckStatus status = CheckStatus::pass;
  json witness;  ///< null unless status is fail
  json details = json::object();
  double elapsed_ms = 0;

  /// Timing is left out by default so identical runs give identical output.
  json to_json(bool timing = false) const {
    json j{{"name", name}, {"params", params}, {"status", to_string(status)}, {"witness", witness}, {"details", details}};
    if (timing) j["elapsed_ms"] = elapsed_ms;
    return j;
  }
};

struct VerifyOptions {
  unsigned threads = 1;
  /// Instances on Δⁿ with larger n are reported skipped-budget.
  int max_n = 3;
  bool allow_long = false;
  /// Search-node budget for optimal enumeration; 0 = unlimited.
  std::uint64_t node_budget = 0;
  /// Largest matching complex a verifier may materialize.
  std::uint64_t face_budget = 5'000'000;
  ResultCache* cache = nullptr;
};

namespace detail {

struct CheckFailed {
  json witness;
  std::string reason;
};

inline void require(bool ok, const json& witness, const std::string& reason) {
  if (!ok) throw CheckFailed{witness, reason};
}

// Witness built only on failure; for checks run once per matching.
template <class F>
  requires std::is_invocable_r_v<json, F>
inline void require(bool ok, F&& witness, const std::string& reason) {
  if (!ok) throw CheckFailed{witness(), reason};
}

inline void gate_n(int n, const VerifyOptions& o) {
  if (n > o.max_n) throw BudgetExceeded("n = " + std::to_string(n) + " exceeds max-n " + std::to_string(o.max_n));
}

inline VerificationReport run_check(std::string name, json params, const std::function<void(VerificationReport&)>& body) {
  VerificationReport r;
  r.name = std::move(name);
  r.params = std::move(params);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const CheckFailed& f) {
    r.status = CheckStatus::fail;
    r.witness = f.witness.is_null() ? json(f.reason) : f.witness;
    r.details["reason"] = f.reason;
  } catch (const BudgetExceeded& e) {
    r.status = CheckStatus::skipped_budget;
    r.details["reason"] = e.what();
  } catch (const ResourceLimitExceeded& e) {
    r.status = CheckStatus::skipped_budget;
    r.details["reason"] = e.what();
  }
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

using EdgeList = std::vector<EdgeIndex>;

inline std::vector<EdgeList> sorted_optimal(const HasseDiagram& h, const VerifyOptions& o) {
  std::vector<EdgeList> out;
  OptimalOptions oo;
  oo.threads = o.threads;
  oo.node_budget = o.node_budget;
  enumerate_optimal(h, [&](std::span<const EdgeIndex> m) { out.emplace_back(m.begin(), m.end()); }, oo);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::ptrdiff_t find_sorted(const std::vector<EdgeList>& v, const EdgeList& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  return (it != v.end() && *it == x) ? it - v.begin() : -1;
}

// Inverse of an injective edge map, -1 where undefined.
inline std::vector<std::int64_t> invert(const std::vector<EdgeIndex>& map, std::size_t target_size) {
  std::vector<std::int64_t> back(target_size, -1);
  for (std::size_t e = 0; e < map.size(); ++e) back[map[e]] = std::int64_t(e);
  return back;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * std::uint64_t(n - k + i) / std::uint64_t(i);
  return r;
}

inline BuildOptions build_options(const VerifyOptions& o) {
  BuildOptions b;
  b.threads = o.threads;
  b.face_cap = o.face_budget;
  return b;
}

inline std::vector<VertexId> as_vertex_map(const std::vector<EdgeIndex>& m) { return {m.begin(), m.end()}; }

}  // namespace detail

/// Graph on the facets F_0..F_n of Δⁿ (F_i omits vertex i). An (n-2)-face
/// omits two vertices i < j and is the shared face of F_i and F_j.
struct FacetGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  static std::pair<int, int> edge_of(std::span<const VertexId> face, int n) {
    std::vector<int> missing;
    std::size_t k = 0;
    for (int v = 0; v <= n; ++v) {
      if (k < face.size() && face[k] == VertexId(v)) ++k;
      else missing.push_back(v);
    }
    if (missing.size() != 2) throw std::invalid_argument("face is not of codimension two in the simplex");
    return {missing[0], missing[1]};
  }

  bool is_spanning_tree() const {
    if (edges.size() != std::size_t(n)) return false;
    std::vector<int> parent(std::size_t(n) + 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[std::size_t(x)] == x ? x : parent[std::size_t(x)] = find(parent[std::size_t(x)]); };
    for (auto [a, b] : edges) {
      const int ra = find(a), rb = find(b);
      if (ra == rb) return false;
      parent[std::size_t(ra)] = rb;
    }
    return true;
  }

  json to_json() const {
    json out = json::array();
    for (auto [a, b] : edges) out.push_back("F" + std::to_string(a) + "-F" + std::to_string(b));
    return out;
  }
};

// ---------------------------------------------------------------------------
// Checks

/// Deleting the pair at the top simplex maps optimal matchings of Δⁿ onto
/// those of ∂Δⁿ; pairing the lone critical (n-1)-face with the top simplex
/// maps back. Both directions are checked matching by matching.
inline VerificationReport verify_top_facet_bijection(int n, const VerifyOptions& o = {}) {
  if (n < 2) throw std::invalid_argument("top-facet bijection needs n >= 2");
  return detail::run_check("top-facet-bijection", {{"n", n}}, [&](VerificationReport& r) {
    using detail::require;
    detail::gate_n(n, o);
    HasseDiagram hd(build_simplex(n)), hb(build_boundary(n));
    const auto A = detail::sorted_optimal(hd, o), B = detail::sorted_optimal(hb, o);
    const auto incl = induced_inclusion(hb, hd);
    const auto back = detail::invert(incl, hd.edge_count());
    const FaceId sigma = hd.face_id(n, 0);

    auto phi = [&](const detail::EdgeList& a) {
      detail::EdgeList out;
      int top = 0;
      for (EdgeIndex e : a) {
        if (hd.edge(e).upper == sigma) {
          ++top;
          continue;
        }
        require(back[e] >= 0, [&] { return matching_json(hd, a); }, "edge outside the boundary survives deletion");
        out.push_back(EdgeIndex(back[e]));
      }
      require(top == 1, [&] { return matching_json(hd, a); }, "optimal matching does not pair the top simplex exactly once");
      return out;
    };
    auto psi = [&](const detail::EdgeList& b) {
      const auto crit = critical_faces(hb, b);
      require(crit.total() == 2 && crit.counts[0] == 1 && crit.by_dim[std::size_t(n - 1)].size() == 1,
              [&] { return matching_json(hb, b); }, "boundary matching lacks exactly one critical vertex and one critical (n-1)-face");
      const auto tau = hd.find_face(hb.face_vertices(crit.by_dim[std::size_t(n - 1)][0]));
      detail::EdgeList out;
      for (EdgeIndex e : b) out.push_back(incl[e]);
      out.push_back(*hd.find_edge(*tau, sigma));
      std::sort(out.begin(), out.end());
      return out;
    };

    require(A.size() == B.size(), json{{"simplex", A.size()}, {"boundary", B.size()}}, "optimal counts differ");
    std::vector<char> hit(B.size(), 0);
    for (const auto& a : A) {
      const auto b = phi(a);
      const auto idx = detail::find_sorted(B, b);
      require(idx >= 0, [&] { return matching_json(hd, a); }, "image under deletion is not optimal on the boundary");
      require(!hit[std::size_t(idx)], [&] { return matching_json(hd, a); }, "deletion map is not injective");
      hit[std::size_t(idx)] = 1;
      require(psi(b) == a, [&] { return matching_json(hd, a); }, "psi(phi(a)) != a");
    }
    for (const auto& b : B) {
      const auto a = psi(b);
      require(detail::find_sorted(A, a) >= 0, [&] { return matching_json(hb, b); }, "extension is not optimal on the simplex");
      require(phi(a) == b, [&] { return matching_json(hb, b); }, "phi(psi(b)) != b");
    }
    r.details = {{"optimal_simplex", A.size()}, {"optimal_boundary", B.size()}};
  });
}

/// Every optimal matching on Δⁿ has C(n, k+1) pairs between dimensions k and
/// k+1, and its single critical face is a vertex.
inline VerificationReport verify_layer_counts(int n, const VerifyOptions& o = {}) {
  if (n < 1) throw std::invalid_argument("layer counts need n >= 1");
  return detail::run_check("layer-counts", {{"n", n}}, [&](VerificationReport& r) {
    using detail::require;
    detail::gate_n(n, o);
    HasseDiagram h(build_simplex(n));
    std::vector<std::uint64_t> expected;
    for (int k = 0; k < n; ++k) expected.push_back(detail::binomial(n, k + 1));
    OptimalOptions oo;
    oo.threads = o.threads;
    oo.node_budget = o.node_budget;
    std::uint64_t seen = 0;
    enumerate_optimal(
        h,
        [&](std::span<const EdgeIndex> m) {
          ++seen;
          require(pairs_per_layer(h, m) == expected, [&] { return matching_json(h, m); }, "layer counts differ from C(n, k+1)");
          const auto crit = critical_faces(h, m);
          require(crit.total() == 1 && crit.counts[0] == 1, [&] { return matching_json(h, m); }, "critical face is not a single vertex");
        },
        oo);
    r.details = {{"matchings", seen}, {"layer_counts", expected}};
  });
}

/// Optimal matchings on the (n-2)-skeleton of Δⁿ leave n critical
/// (n-2)-faces; read as edges between facets they form a spanning tree.
inline VerificationReport verify_spanning_tree(int n, const VerifyOptions& o = {}) {
  if (n < 3) throw std::invalid_argument("spanning-tree check needs n >= 3");
  return detail::run_check("spanning-tree", {{"n", n}}, [&](VerificationReport& r) {
    using detail::require;
    detail::gate_n(n, o);
    HasseDiagram h(skeleton(build_simplex(n), n - 2));
    OptimalOptions oo;
    oo.threads = o.threads;
    oo.node_budget = o.node_budget;
    std::set<std::vector<std::pair<int, int>>> trees;
    auto tree_of = [&](std::span<const EdgeIndex> m) {
      const auto crit = critical_faces(h, m);
      FacetGraph g;
      g.n = n;
      for (FaceId f : crit.by_dim[std::size_t(n - 2)]) g.edges.push_back(FacetGraph::edge_of(h.face_vertices(f), n));
      std::sort(g.edges.begin(), g.edges.end());
      return g;
    };
    const auto summary = enumerate_optimal(
        h,
        [&](std::span<const EdgeIndex> m) {
          const auto g = tree_of(m);
          require(g.edges.size() == std::size_t(n), [&] { return matching_json(h, m); }, "wrong number of critical (n-2)-faces");
          require(g.is_spanning_tree(), [&] { return json{{"matching", matching_json(h, m)}, {"graph", g.to_json()}}; },
                  "critical faces do not form a spanning tree");
          trees.insert(g.edges);
        },
        oo);
    r.details = {{"matchings", summary.count}, {"distinct_trees", trees.size()}};
    if (n == 3) {
      // (v1, v0v1), (v2, v0v2), (v3, v0v3) gives the star at F0.
      std::vector<EdgeIndex> star;
      for (VertexId v = 1; v <= 3; ++v) {
        const Simplex lo{v}, up{0, v};
        star.push_back(*h.find_edge(lo, up));
      }
      std::sort(star.begin(), star.end());
      const auto g = tree_of(star);
      const std::vector<std::pair<int, int>> want{{0, 1}, {0, 2}, {0, 3}};
      require(is_acyclic(h, star) && g.edges == want, g.to_json(), "example matching does not give the star at F0");
      require(trees.size() == 16, json{{"distinct_trees", trees.size()}}, "expected all 16 spanning trees of K4");
      r.details["example_tree"] = g.to_json();
    }
  });
}

/// Restricting optimal matchings of Δⁿ to the (n-2)-skeleton lands on optimal
/// matchings there, is onto, and every fibre has n+1 elements.
inline VerificationReport verify_restriction_fibers(int n, const VerifyOptions& o = {}) {
  if (n < 3) throw std::invalid_argument("restriction check needs n >= 3");
  return detail::run_check("restriction-fibers", {{"n", n}}, [&](VerificationReport& r) {
    using detail::require;
    detail::gate_n(n, o);
    HasseDiagram hd(build_simplex(n)), hs(skeleton(build_simplex(n), n - 2));
    const auto A = detail::sorted_optimal(hd, o), S = detail::sorted_optimal(hs, o);
    const auto back = detail::invert(induced_inclusion(hs, hd), hd.edge_count());
    auto restrict_to = [&](const detail::EdgeList& a) {
      detail::EdgeList out;
      for (EdgeIndex e : a)
        if (hd.edge(e).dim < n - 2) out.push_back(EdgeIndex(back[e]));
      return out;
    };
    std::vector<std::uint64_t> fiber(S.size(), 0);
    for (const auto& a : A) {
      const auto idx = detail::find_sorted(S, restrict_to(a));
      require(idx >= 0, [&] { return matching_json(hd, a); }, "restriction is not optimal on the skeleton");
      ++fiber[std::size_t(idx)];
    }
    for (std::size_t i = 0; i < S.size(); ++i)
      require(fiber[i] == std::uint64_t(n + 1), [&] { return json{{"matching", matching_json(hs, S[i])}, {"fiber", fiber[i]}}; },
              "fibre size differs from n+1");
    require(A.size() == std::size_t(n + 1) * S.size(), json{{"simplex", A.size()}, {"skeleton", S.size()}},
            "count identity fails");
    r.details = {{"optimal_simplex", A.size()}, {"optimal_skeleton", S.size()}, {"fiber_size", n + 1}};

    if (n == 3) {
      detail::EdgeList ex;
      for (VertexId v = 1; v <= 3; ++v) {
        const Simplex lo{v}, up{0, v};
        ex.push_back(*hs.find_edge(lo, up));
      }
      std::sort(ex.begin(), ex.end());
      const FaceId sigma = hd.face_id(n, 0);
      std::set<int> roots;
      json fibre = json::array();
      for (const auto& a : A) {
        if (restrict_to(a) != ex) continue;
        for (EdgeIndex e : a)
          if (hd.edge(e).upper == sigma) {
            auto face = hd.face_vertices(hd.edge(e).lower);
            int root = 0;
            while (root < int(face.size()) && face[std::size_t(root)] == VertexId(root)) ++root;
            roots.insert(root);
            fibre.push_back({{"root", "F" + std::to_string(root)}, {"matching", matching_json(hd, a)}});
          }
      }
      require(fibre.size() == 4 && roots.size() == 4, fibre, "example fibre is not one extension per root facet");
      r.details["example_fiber"] = fibre;
    }
  });
}

/// For every face mu of M(K), mu + e0 is an acyclic matching on the cone,
/// where e0 pairs the apex with the edge to w0.
inline VerificationReport verify_cone_contiguity(const std::string& label, const SimplicialComplex& k, VertexId w0,
                                                 const VerifyOptions& o = {}) {
  auto hk = std::make_shared<const HasseDiagram>(k);
  if (hk->edge_count() == 0) throw std::invalid_argument("cone contiguity needs a complex with a Hasse edge");
  return detail::run_check("cone-contiguity", {{"complex", label}, {"w0", w0}}, [&](VerificationReport& r) {
    using detail::require;
    const auto mk = build_matching_complex(hk, Variant::M, detail::build_options(o));
    const auto cp = cone_pair(k, w0);
    HasseDiagram hc(cp.complex);
    const auto incl = induced_inclusion(*hk, hc);
    const EdgeIndex e0 = cp.e0;
    require(is_acyclic(hc, std::vector<EdgeIndex>{e0}), hc.edge_label(e0), "e0 alone is not a gradient field");
    std::uint64_t checked = 0;
    for (int d = 0; d <= mk.complex.dimension(); ++d)
      for (std::size_t i = 0; i < mk.complex.face_count(d); ++i) {
        detail::EdgeList mu;
        for (EdgeIndex e : mk.edges_of(d, i)) mu.push_back(incl[e]);
        require(!std::binary_search(mu.begin(), mu.end(), e0), [&] { return matching_json(hc, mu); }, "e0 in the image of M(K)");
        mu.push_back(e0);
        std::sort(mu.begin(), mu.end());
        require(is_matching(hc, mu) && is_acyclic(hc, mu), [&] { return matching_json(hc, mu); }, "mu + e0 is not an acyclic matching");
        ++checked;
      }
    r.details = {{"faces_checked", checked}, {"e0", hc.edge_label(e0)}, {"fvector_MK", mk.complex.f_vector()}};
  });
}

/// For L = cone(K): H~_k(M(L), M(K)) = H~_k(M(L)) + H~_{k-1}(M(K)) in each
/// degree, ranks and torsion. The void complex has H~_{-1} = Z.
inline VerificationReport verify_pair_splitting(const std::string& l_label, const SimplicialComplex& l,
                                                const std::string& k_label, const SimplicialComplex& k,
                                                const VerifyOptions& o = {}) {
  if (k.is_void() || !(cone(k).complex == l)) throw std::invalid_argument("pair is not (cone(K), K)");
  return detail::run_check("pair-splitting", {{"L", l_label}, {"K", k_label}}, [&](VerificationReport& r) {
    using detail::require;
    auto hl = std::make_shared<const HasseDiagram>(l);
    auto hk = std::make_shared<const HasseDiagram>(k);
    const auto ml = build_matching_complex(hl, Variant::M, detail::build_options(o));
    const auto mk = build_matching_complex(hk, Variant::M, detail::build_options(o));
    HomologyOptions ho;
    ho.threads = o.threads;
    const auto h_l = homology(ml.complex, true, ho);
    const auto h_k = homology(mk.complex, true, ho);
    const auto rel = relative_homology(ml.complex, mk.complex, detail::as_vertex_map(induced_inclusion(*hk, *hl)), true, ho);
    auto torsion_at = [](const HomologyResult& h, int d) {
      for (const auto& g : h.groups)
        if (g.degree == d) return g.torsion;
      return std::vector<BigInt>{};
    };
    const int top = std::max(ml.complex.dimension(), mk.complex.dimension() + 1);
    json table = json::array();
    for (int d = 0; d <= top; ++d) {
      const auto lhs = rel.betti(d);
      const auto rhs = reduced_betti_or_void(h_l, d) + reduced_betti_or_void(h_k, d - 1);
      auto tor = torsion_at(h_l, d);
      for (auto& t : torsion_at(h_k, d - 1)) tor.push_back(t);
      const json row{{"degree", d}, {"relative", lhs}, {"L", reduced_betti_or_void(h_l, d)},
                     {"K_shifted", reduced_betti_or_void(h_k, d - 1)}};
      require(lhs == rhs, row, "ranks do not split");
      require(canonical_torsion(torsion_at(rel, d)) == canonical_torsion(tor), row, "torsion does not split");
      if (lhs || rhs) table.push_back(row);
    }
    r.details = {{"nonzero_degrees", table}, {"relative", homology_json(rel)}};
  });
}

/// The pair (M(Δ³), M(∂Δ³)): relative H_4 = Z^96, H_5 = 0, and the exact
/// sequence 0 -> Z^24 -> Z^99 -> Z^96 -> Z^21 -> 0.
inline VerificationReport verify_les_example(const VerifyOptions& o = {}) {
  return detail::run_check("les-example", json::object(), [&](VerificationReport& r) {
    using detail::require;
    detail::gate_n(3, o);
    auto hl = std::make_shared<const HasseDiagram>(build_simplex(3));
    auto hk = std::make_shared<const HasseDiagram>(build_boundary(3));
    const auto ml = build_matching_complex(hl, Variant::M, detail::build_options(o));
    const auto mk = build_matching_complex(hk, Variant::M, detail::build_options(o));
    HomologyOptions ho;
    ho.threads = o.threads;
    const auto h_l = homology(ml.complex, true, ho), h_k = homology(mk.complex, true, ho);
    const auto rel = relative_homology(ml.complex, mk.complex, detail::as_vertex_map(induced_inclusion(*hk, *hl)), true, ho);
    const json ranks{{"K4", h_k.betti(4)}, {"L4", h_l.betti(4)}, {"rel4", rel.betti(4)}, {"K3", h_k.betti(3)},
                     {"rel5", rel.betti(5)}};
    require(rel.betti(4) == 96 && rel.betti(5) == 0, ranks, "relative groups differ from Z^96, 0");
    require(h_k.betti(4) == 24 && h_l.betti(4) == 99 && h_k.betti(3) == 21, ranks, "absolute groups differ");
    require(rel.torsion_free() && h_l.torsion_free() && h_k.torsion_free(), ranks, "unexpected torsion");
    const auto alt = std::int64_t(h_k.betti(4)) - std::int64_t(h_l.betti(4)) + std::int64_t(rel.betti(4)) -
                     std::int64_t(h_k.betti(3));
    require(alt == 0, ranks, "alternating rank sum of the exact sequence is nonzero");
    r.details = {{"ranks", ranks}, {"alternating_sum", alt}, {"relative", homology_json(rel)}};
  });
}

/// GM(Δⁿ) = GM(∂Δⁿ) ∪ cones e_i * L_i, where e_i = (F_i, top simplex) and
/// L_i = link of e_i = matchings on ∂Δⁿ avoiding F_i.
inline VerificationReport verify_gm_structure(int n, const VerifyOptions& o = {}) {
  if (n < 2 || n > 3) throw std::invalid_argument("GM structure check supports n = 2, 3");
  return detail::run_check("gm-structure", {{"n", n}}, [&](VerificationReport& r) {
    using detail::require;
    detail::gate_n(n, o);
    auto hd = std::make_shared<const HasseDiagram>(build_simplex(n));
    auto hb = std::make_shared<const HasseDiagram>(build_boundary(n));
    const auto gd = build_matching_complex(hd, Variant::GM, detail::build_options(o));
    const auto gb = build_matching_complex(hb, Variant::GM, detail::build_options(o));
    const auto incl = induced_inclusion(*hb, *hd);
    const auto back = detail::invert(incl, hd->edge_count());
    const FaceId sigma = hd->face_id(n, 0);

    std::vector<EdgeIndex> e(std::size_t(n) + 1);
    std::vector<FaceId> facet(std::size_t(n) + 1);
    std::vector<int> which(hd->edge_count(), -1);
    for (int i = 0; i <= n; ++i) {
      Simplex f;
      for (int v = 0; v <= n; ++v)
        if (v != i) f.push_back(VertexId(v));
      facet[std::size_t(i)] = *hd->find_face(f);
      e[std::size_t(i)] = *hd->find_edge(facet[std::size_t(i)], sigma);
      which[e[std::size_t(i)]] = i;
    }
    auto touches = [&](EdgeIndex x, int i) {
      return hd->edge(x).lower == facet[std::size_t(i)] || hd->edge(x).upper == facet[std::size_t(i)];
    };

    // (i), (ii): every face is in GM(∂Δⁿ) or in exactly one cone.
    std::vector<std::uint64_t> cone_faces(std::size_t(n) + 1, 0);
    std::uint64_t boundary_faces = 0;
    for (int d = 0; d <= gd.complex.dimension(); ++d)
      for (std::size_t j = 0; j < gd.complex.face_count(d); ++j) {
        const auto mu = gd.edges_of(d, j);
        int apex = -1, apexes = 0;
        Simplex nu;
        for (EdgeIndex x : mu) {
          if (which[x] >= 0) {
            apex = which[x];
            ++apexes;
          } else {
            require(back[x] >= 0, [&] { return matching_json(*hd, mu); }, "edge outside the boundary without the top simplex");
            nu.push_back(VertexId(back[x]));
          }
        }
        std::sort(nu.begin(), nu.end());
        require(apexes <= 1, [&] { return matching_json(*hd, mu); }, "two cone apexes in one face: stars are not disjoint");
        require(nu.empty() || gb.complex.contains(nu), [&] { return matching_json(*hd, mu); }, "face part is not a matching on the boundary");
        if (apex < 0) {
          ++boundary_faces;
          continue;
        }
        for (EdgeIndex x : mu)
          require(x == e[std::size_t(apex)] || !touches(x, apex), [&] { return matching_json(*hd, mu); }, "cone face uses an edge at F_i");
        ++cone_faces[std::size_t(apex)];
      }
    // Converse: every matching on ∂Δⁿ avoiding F_i extends by e_i.
    std::vector<std::vector<std::uint64_t>> avoid_f(std::size_t(n) + 1);
    for (int i = 0; i <= n; ++i)
      for (int d = 0; d <= gb.complex.dimension(); ++d)
        for (std::size_t j = 0; j < gb.complex.face_count(d); ++j) {
          Simplex mu;
          bool ok = true;
          for (VertexId x : gb.complex.face(d, j)) {
            ok = ok && !touches(incl[x], i);
            mu.push_back(incl[x]);
          }
          if (!ok) continue;
          mu.push_back(e[std::size_t(i)]);
          std::sort(mu.begin(), mu.end());
          require(gd.complex.contains(mu), [&] { return matching_json(*hd, mu); }, "matching avoiding F_i does not extend by e_i");
          auto& f = avoid_f[std::size_t(i)];
          if (f.size() <= std::size_t(d)) f.resize(std::size_t(d) + 1, 0);
          ++f[std::size_t(d)];
        }

    // (iii)-(v): the links.
    const auto model = build_matching_complex(cone(build_boundary(n - 1)).complex, Variant::GM, detail::build_options(o));
    json links = json::array();
    for (int i = 0; i <= n; ++i) {
      const Simplex apex{e[std::size_t(i)]};
      const auto sl = star_link(gd.complex, apex);
      const auto& li = sl.link;
      const auto fv = li.f_vector();
      require(fv == avoid_f[std::size_t(i)], json{{"i", i}, {"link", fv}}, "link differs from matchings avoiding F_i");
      require(cone_faces[std::size_t(i)] == li.total_faces() + 1, json{{"i", i}}, "cone face count mismatch");
      const auto iso = is_isomorphic(li, model.complex);
      require(iso.has_value(), json{{"i", i}}, "link is not isomorphic to GM(v * ∂Δ^{n-1})");
      json entry{{"i", i}, {"fvector", fv}, {"euler", li.euler_characteristic()}};
      if (n == 3) {
        const std::vector<std::uint64_t> want{21, 162, 570, 924, 612, 116};
        require(fv == want, entry, "link f-vector differs from (21, 162, 570, 924, 612, 116)");
        require(li.euler_characteristic() == 1, entry, "link Euler characteristic is not 1");
        HomologyOptions ho;
        ho.threads = o.threads;
        const auto h = homology(li, true, ho);
        entry["homology"] = homology_json(h);
        require(h.torsion_free() && h.betti(3) == 2 && h.betti(4) == 2 && h.support() == std::vector<int>{3, 4}, entry,
                "link homology differs from Z^2 in degrees 3 and 4");
      } else {
        require(fv == std::vector<std::uint64_t>{4, 3}, entry, "link f-vector differs from (4, 3)");
        FacetGraph g;  // reuse union-find on the link graph
        g.n = int(li.vertex_count()) - 1;
        for (std::size_t j = 0; j < li.face_count(1); ++j)
          g.edges.emplace_back(int(li.face(1, j)[0]), int(li.face(1, j)[1]));
        require(g.is_spanning_tree(), entry, "link is not a tree");
        entry["tree"] = true;
      }
      links.push_back(entry);
    }
    r.details = {{"fvector_GM_simplex", gd.complex.f_vector()},
                 {"fvector_GM_boundary", gb.complex.f_vector()},
                 {"faces_in_boundary_part", boundary_faces},
                 {"faces_per_cone", cone_faces},
                 {"links", links}};
  });
}

/// The inclusion M(K) -> M(L) is injective, simplicial, and has full image.
inline VerificationReport verify_inclusion_full(const std::string& k_label, const SimplicialComplex& k,
                                                const std::string& l_label, const SimplicialComplex& l,
                                                const VerifyOptions& o = {}) {
  if (!k.is_subcomplex_of(l)) throw std::invalid_argument("K is not a subcomplex of L");
  return detail::run_check("inclusion-full", {{"K", k_label}, {"L", l_label}}, [&](VerificationReport& r) {
    using detail::require;
    auto hk = std::make_shared<const HasseDiagram>(k);
    auto hl = std::make_shared<const HasseDiagram>(l);
    const auto mk = build_matching_complex(hk, Variant::M, detail::build_options(o));
    const auto ml = build_matching_complex(hl, Variant::M, detail::build_options(o));
    const auto incl = induced_inclusion(*hk, *hl);
    auto distinct = incl;
    std::sort(distinct.begin(), distinct.end());
    require(std::adjacent_find(distinct.begin(), distinct.end()) == distinct.end(), json(incl),
            "edge map is not injective");
    SimplexSet image;
    for (int d = 0; d <= mk.complex.dimension(); ++d)
      for (std::size_t i = 0; i < mk.complex.face_count(d); ++i) {
        Simplex s;
        for (VertexId v : mk.complex.face(d, i)) s.push_back(incl[v]);
        require(ml.complex.contains(s), [&] { return matching_json(*hl, s); }, "image of a face is not a face");
        image.insert(std::move(s));
      }
    std::vector<char> in_image(ml.complex.vertex_count(), 0);
    for (EdgeIndex x : incl) in_image[x] = 1;
    for (int d = 0; d <= ml.complex.dimension(); ++d)
      for (std::size_t i = 0; i < ml.complex.face_count(d); ++i) {
        auto f = ml.complex.face(d, i);
        if (!std::all_of(f.begin(), f.end(), [&](VertexId v) { return in_image[v] != 0; })) continue;
        require(image.contains(Simplex(f.begin(), f.end())), [&] { return matching_json(*hl, f); }, "image is not a full subcomplex");
      }
    r.details = {{"vertices_mapped", incl.size()}, {"image_faces", image.size()}, {"faces_L", ml.complex.total_faces()}};
  });
}

/// Alternating sum of the M(Δ⁴) f-vector. Uses a fresh count when long runs
/// are allowed, else a cached one, else the published vector itself.
inline VerificationReport verify_euler_obstruction_n4(const VerifyOptions& o = {}) {
  return detail::run_check("euler-obstruction-n4", json::object(), [&](VerificationReport& r) {
    using detail::require;
    const auto& ref = reference_fvector_m_simplex4();
    std::vector<std::uint64_t> f = ref;
    std::string source = "published";
    const auto key = fvector_cache_key("simplex:4", Variant::M);
    if (o.allow_long || o.max_n >= 4) {
      f = count_matchings_layered(HasseDiagram(build_simplex(4)), MatchingMode::acyclic);
      source = "computed";
      if (o.cache) o.cache->put(key, json{{"f_vector", f}, {"method", "layered"}}.dump());
    } else if (o.cache) {
      if (auto payload = o.cache->get(key)) {
        try {
          f = json::parse(*payload).at("f_vector").get<std::vector<std::uint64_t>>();
          source = "cache";
        } catch (const json::exception&) {
          f = ref;
        }
      }
    }
    for (std::size_t i = 0; i < std::max(f.size(), ref.size()); ++i)
      require(i < f.size() && i < ref.size() && f[i] == ref[i],
              json{{"index", i}, {"source", source}, {"value", i < f.size() ? json(f[i]) : json()}},
              "f-vector differs from the reference vector");
    const auto chi = alternating_sum(f);
    require(chi == kReferenceEulerMSimplex4, json{{"euler", chi}}, "Euler characteristic differs from 212457");
    require(f.back() == 380125, json{{"top", f.back()}}, "top entry differs from 380125");
    const auto reduced = chi - 1;
    require(reduced > 0, json{{"reduced_euler", reduced}}, "reduced Euler characteristic is not positive");
    r.details = {{"source", source},
                 {"f_vector", f},
                 {"euler", chi},
                 {"reduced_euler", reduced},
                 {"single_degree_wedge_degree", "even"}};
  });
}

/// Homology of variant(Δⁿ) against variant(∂Δⁿ). Agreement is recorded as
/// evidence, never as a proof.
inline VerificationReport verify_conjecture(Variant v, int n, const VerifyOptions& o = {}) {
  if (v == Variant::M) throw std::invalid_argument("conjecture checks cover MP and GM");
  if (n < 2) throw std::invalid_argument("conjecture checks need n >= 2");
  const std::string name = v == Variant::MP ? "conjecture-pure" : "conjecture-gm";
  return detail::run_check(name, {{"n", n}}, [&](VerificationReport& r) {
    using detail::require;
    detail::gate_n(n, o);
    HomologyOptions ho;
    ho.threads = o.threads;
    const auto a = build_matching_complex(build_simplex(n), v, detail::build_options(o));
    const auto b = build_matching_complex(build_boundary(n), v, detail::build_options(o));
    const auto ha = homology(a.complex, true, ho), hb = homology(b.complex, true, ho);
    const int top = std::max(a.complex.dimension(), b.complex.dimension());
    for (int d = 0; d <= top; ++d) {
      std::vector<BigInt> ta, tb;
      for (const auto& g : ha.groups)
        if (g.degree == d) ta = g.torsion;
      for (const auto& g : hb.groups)
        if (g.degree == d) tb = g.torsion;
      require(ha.betti(d) == hb.betti(d) && ta == tb, json{{"degree", d}}, "homology differs");
    }
    r.status = CheckStatus::evidence;
    r.details = {{"simplex", homology_json(ha)}, {"boundary", homology_json(hb)}, {"label", "conjecture evidence"}};
  });
}

// ---------------------------------------------------------------------------
// Registry

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"top-facet-bijection", "layer-counts",     "spanning-tree",
                                              "restriction-fibers",  "cone-contiguity",  "pair-splitting",
                                              "les-example",         "gm-structure",     "inclusion-full",
                                              "euler-obstruction-n4", "conjecture-pure", "conjecture-gm"};
  return names;
}

/// Optional instance overrides for a single named check.
struct CheckRequest {
  std::optional<int> n;
  std::optional<std::string> complex;   ///< cone-contiguity base; L for pair checks
  std::optional<std::string> relative;  ///< K for pair checks
  VertexId w0 = 0;
};

/// Runs one named check over its default instances (or the requested one).
/// Reports come back in a fixed order.
inline std::vector<VerificationReport> run_named_check(const std::string& name, const VerifyOptions& o,
                                                       const CheckRequest& req = {}) {
  auto ns = [&](std::vector<int> defaults) { return req.n ? std::vector<int>{*req.n} : defaults; };
  std::vector<std::function<VerificationReport()>> jobs;
  if (name == "top-facet-bijection") {
    for (int n : ns({2, 3, 4})) jobs.push_back([n, &o] { return verify_top_facet_bijection(n, o); });
  } else if (name == "layer-counts") {
    for (int n : ns({2, 3, 4})) jobs.push_back([n, &o] { return verify_layer_counts(n, o); });
  } else if (name == "spanning-tree") {
    for (int n : ns({3, 4})) jobs.push_back([n, &o] { return verify_spanning_tree(n, o); });
  } else if (name == "restriction-fibers") {
    for (int n : ns({3, 4})) jobs.push_back([n, &o] { return verify_restriction_fibers(n, o); });
  } else if (name == "cone-contiguity") {
    std::vector<std::string> specs = req.complex ? std::vector<std::string>{*req.complex}
                                                 : std::vector<std::string>{"simplex:1", "boundary:2", "simplex:2"};
    for (auto s : specs) {
      const auto canon = parse_complex_spec(s).canonical();
      auto k = build_complex(s);
      const VertexId w0 = req.w0;
      jobs.push_back([canon, k, w0, &o] { return verify_cone_contiguity(canon, k, w0, o); });
    }
  } else if (name == "pair-splitting" || name == "inclusion-full") {
    std::vector<std::pair<std::string, std::string>> pairs;  // (L, K)
    if (req.complex || req.relative) {
      if (!req.complex || !req.relative) throw std::invalid_argument(name + " needs both --complex and --relative");
      pairs.emplace_back(*req.complex, *req.relative);
    } else if (name == "pair-splitting") {
      pairs = {{"simplex:3", "simplex:2"}, {"simplex:2", "simplex:1"}, {"simplex:1", "simplex:0"}};
    } else {
      pairs = {{"simplex:3", "boundary:3"}, {"simplex:3", "simplex:2"}, {"simplex:3", "simplex:3"}};
    }
    for (const auto& [ls, ks] : pairs) {
      const auto lc = parse_complex_spec(ls).canonical(), kc = parse_complex_spec(ks).canonical();
      auto l = build_complex(ls);
      auto k = build_complex(ks);
      if (name == "pair-splitting") {
        if (k.is_void() || !(cone(k).complex == l)) throw std::invalid_argument("pair is not (cone(K), K)");
        jobs.push_back([lc, l, kc, k, &o] { return verify_pair_splitting(lc, l, kc, k, o); });
      } else {
        if (!k.is_subcomplex_of(l)) throw std::invalid_argument("K is not a subcomplex of L");
        jobs.push_back([lc, l, kc, k, &o] { return verify_inclusion_full(kc, k, lc, l, o); });
      }
    }
  } else if (name == "les-example") {
    jobs.push_back([&o] { return verify_les_example(o); });
  } else if (name == "gm-structure") {
    for (int n : ns({2, 3})) {
      if (n < 2 || n > 3) throw std::invalid_argument("GM structure check supports n = 2, 3");
      jobs.push_back([n, &o] { return verify_gm_structure(n, o); });
    }
  } else if (name == "euler-obstruction-n4") {
    jobs.push_back([&o] { return verify_euler_obstruction_n4(o); });
  } else if (name == "conjecture-pure" || name == "conjecture-gm") {
    const auto v = name == "conjecture-pure" ? Variant::MP : Variant::GM;
    for (int n : ns({2, 3, 4})) {
      if (n < 2) throw std::invalid_argument("conjecture checks need n >= 2");
      jobs.push_back([v, n, &o] { return verify_conjecture(v, n, o); });
    }
  } else {
    throw std::invalid_argument("unknown check '" + name + "'");
  }
  std::vector<VerificationReport> out(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i]();
  return out;
}

/// Every check over its default instances, in declaration order.
inline std::vector<VerificationReport> run_all_checks(const VerifyOptions& o) {
  std::vector<std::vector<VerificationReport>> parts(check_names().size());
  detail::parallel_for(parts.size(), o.threads, [&](std::size_t i) { parts[i] = run_named_check(check_names()[i], o); });
  std::vector<VerificationReport> out;
  for (auto& p : parts)
    for (auto& r : p) out.push_back(std::move(r));
  return out;
}

}  // namespace morsematch
