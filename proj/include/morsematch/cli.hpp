#pragma once

#include <chrono>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "morsematch/cache.hpp"
#include "morsematch/complex_spec.hpp"
#include "morsematch/enumerate.hpp"
#include "morsematch/errors.hpp"
#include "morsematch/face_io.hpp"
#include "morsematch/hasse.hpp"
#include "morsematch/homology.hpp"
#include "morsematch/matching_complex.hpp"
#include "morsematch/optimal.hpp"
#include "morsematch/verify.hpp"

namespace morsematch {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_failed = 1, exit_usage = 2, exit_budget = 3 };

/// Complexes whose Hasse diagram has more edges than this need --allow-long.
inline constexpr std::size_t kLongRunEdges = 64;

namespace detail {

struct CliArgs {
  std::string complex;
  std::string variant = "M";
  std::string relative;
  unsigned threads = 1;
  std::uint64_t budget = 0;
  std::string cache_dir;
  std::string out;
  bool allow_long = false;
  bool no_cache = false;
  bool timing = false;
  bool unreduced = false;
  int max_n = 3;
  std::optional<int> n;
  VertexId w0 = 0;
  std::string check = "all";
};

class Cli {
 public:
  Cli(const CliArgs& a, std::ostream& err) : a_(a), err_(err) {
    if (!a.no_cache) cache_ = std::make_unique<ResultCache>(a.cache_dir.empty() ? ResultCache::default_dir() : std::filesystem::path(a.cache_dir));
  }

  json spec_json(const std::string& command) const {
    json s{{"threads", a_.threads}};
    if (command != "verify") {
      s["complex"] = canonical_;
      if (command != "count-optimal") s["variant"] = a_.variant;
    }
    if (!a_.relative.empty()) s["relative"] = parse_complex_spec(a_.relative).canonical();
    if (command == "homology") s["reduced"] = !a_.unreduced;
    if (command == "verify") {
      s["check"] = a_.check;
      s["max-n"] = a_.max_n;
      if (a_.n) s["n"] = *a_.n;
      if (!a_.complex.empty()) s["complex"] = canonical_;
      if (a_.w0) s["w0"] = a_.w0;
    }
    if (a_.budget) s["budget"] = a_.budget;
    return s;
  }

  void load_complex(bool required) {
    if (a_.complex.empty()) {
      if (required) throw SpecError("--complex is required");
      return;
    }
    canonical_ = parse_complex_spec(a_.complex).canonical();
    base_ = build_complex(a_.complex);
  }

  std::shared_ptr<const HasseDiagram> hasse() {
    auto h = std::make_shared<const HasseDiagram>(base_);
    if (h->edge_count() > kLongRunEdges && !a_.allow_long)
      throw BudgetExceeded(canonical_ + " has " + std::to_string(h->edge_count()) + " Hasse edges (limit " +
                           std::to_string(kLongRunEdges) + "); pass --allow-long to run it");
    return h;
  }

  Variant variant() const { return parse_variant(a_.variant); }

  BuildOptions build_options() const {
    BuildOptions b;
    b.threads = a_.threads;
    return b;
  }

  std::optional<json> cached(const std::string& key) {
    if (!cache_) return std::nullopt;
    auto payload = cache_->get(key);
    report_cache_problems();
    if (!payload) return std::nullopt;
    try {
      return json::parse(*payload);
    } catch (const json::exception&) {
      err_ << "warning: cache entry " << key << " is not JSON; ignored\n";
      return std::nullopt;
    }
  }

  void store(const std::string& key, const std::string& payload) {
    if (!cache_) return;
    try {
      cache_->put(key, payload);
    } catch (const std::exception& e) {
      err_ << "warning: " << e.what() << '\n';
    }
  }

  void report_cache_problems() {
    for (; reported_ < cache_->problems().size(); ++reported_) err_ << "warning: " << cache_->problems()[reported_] << '\n';
  }

  FVector fvector_of(const std::shared_ptr<const HasseDiagram>& h, Variant v) {
    if (v == Variant::MP) {
      const auto mc = build_matching_complex(h, v, build_options());
      return mc.complex.f_vector();
    }
    const auto mode = v == Variant::GM ? MatchingMode::all : MatchingMode::acyclic;
    try {
      return count_matchings_layered(*h, mode);
    } catch (const ResourceLimitExceeded&) {
      EnumerationOptions eo;
      eo.threads = a_.threads;
      eo.node_budget = a_.budget;
      return count_matchings(*h, mode, eo);
    }
  }

  json cmd_fvector(bool euler_only) {
    load_complex(true);
    const auto v = variant();
    const auto key = fvector_cache_key(canonical_, v);
    std::vector<std::uint64_t> f;
    if (auto hit = cached(key)) {
      f = hit->at("f_vector").get<std::vector<std::uint64_t>>();
    } else {
      f = fvector_of(hasse(), v);
      store(key, json{{"f_vector", f}}.dump());
    }
    const auto chi = alternating_sum(f);
    json r{{"euler", chi}, {"reduced_euler", chi - 1}};
    if (!euler_only) r["f_vector"] = f;
    return r;
  }

  json cmd_build() {
    load_complex(true);
    const auto v = variant();
    const auto mc = build_matching_complex(hasse(), v, build_options());
    const auto faces = faces_to_string(mc);
    store(cache_key(canonical_, to_string(v), "faces"), faces);
    if (!a_.out.empty()) {
      std::ofstream os(a_.out, std::ios::binary | std::ios::trunc);
      if (!os) throw std::runtime_error("cannot write " + a_.out);
      os << faces;
    }
    json vertices = json::array();
    for (EdgeIndex e : mc.edge_of_vertex) vertices.push_back(mc.hasse->edge_label(e));
    json r{{"void", mc.is_void()},
           {"f_vector", mc.complex.f_vector()},
           {"euler", mc.complex.euler_characteristic()},
           {"hasse_edges", mc.hasse->edge_count()},
           {"vertices", vertices}};
    if (!a_.out.empty()) r["faces_file"] = a_.out;
    return r;
  }

  json cmd_homology() {
    load_complex(true);
    const auto v = variant();
    HomologyOptions ho;
    ho.threads = a_.threads;
    const bool reduced = !a_.unreduced;
    auto hl = hasse();
    const auto ml = build_matching_complex(hl, v, build_options());
    if (a_.relative.empty()) return homology_json(homology(ml.complex, reduced, ho));
    auto k = build_complex(a_.relative);
    if (!k.is_subcomplex_of(base_)) throw SpecError("--relative complex is not a subcomplex of --complex");
    auto hk = std::make_shared<const HasseDiagram>(k);
    const auto mk = build_matching_complex(hk, v, build_options());
    // Vertices of the pure complexes are compact labels; translate through edges.
    const auto incl = induced_inclusion(*hk, *hl);
    std::vector<VertexId> vmap;
    for (EdgeIndex e : mk.edge_of_vertex) {
      const auto target = incl[e];
      auto it = std::lower_bound(ml.edge_of_vertex.begin(), ml.edge_of_vertex.end(), target);
      if (it == ml.edge_of_vertex.end() || *it != target)
        throw SpecError("matching complex of --relative is not a subcomplex for variant " + to_string(v));
      vmap.push_back(VertexId(it - ml.edge_of_vertex.begin()));
    }
    return homology_json(relative_homology(ml.complex, mk.complex, vmap, reduced, ho));
  }

  json cmd_count_optimal() {
    load_complex(true);
    const auto key = cache_key(canonical_, "-", "count-optimal");
    if (auto hit = cached(key)) return *hit;
    OptimalOptions oo;
    oo.threads = a_.threads;
    oo.node_budget = a_.budget;
    const auto s = count_optimal(*hasse(), oo);
    json r{{"count", s.count}, {"max_cardinality", s.max_cardinality}, {"critical_count", s.critical_count}};
    store(key, r.dump());
    return r;
  }

  json cmd_verify(int& code) {
    if (!a_.complex.empty()) canonical_ = parse_complex_spec(a_.complex).canonical();
    VerifyOptions o;
    o.threads = a_.threads;
    o.max_n = a_.max_n;
    o.allow_long = a_.allow_long;
    o.node_budget = a_.budget;
    o.cache = cache_.get();
    std::vector<VerificationReport> reports;
    if (a_.check == "all") {
      reports = run_all_checks(o);
    } else {
      CheckRequest req;
      req.n = a_.n;
      if (!a_.complex.empty()) req.complex = a_.complex;
      if (!a_.relative.empty()) req.relative = a_.relative;
      req.w0 = a_.w0;
      reports = run_named_check(a_.check, o, req);
    }
    if (cache_) report_cache_problems();
    json list = json::array();
    std::map<std::string, int> tally;
    for (const auto& r : reports) {
      list.push_back(r.to_json(a_.timing));
      ++tally[to_string(r.status)];
    }
    const bool failed = tally.count("fail") > 0;
    const bool skipped = tally.count("skipped-budget") > 0;
    code = failed ? exit_failed : (skipped && a_.check != "all") ? exit_budget : exit_ok;
    return {{"reports", list}, {"summary", tally}};
  }

 private:
  const CliArgs& a_;
  std::ostream& err_;
  std::unique_ptr<ResultCache> cache_;
  std::size_t reported_ = 0;
  std::string canonical_;
  SimplicialComplex base_;
};

}  // namespace detail

/// Runs the tool. Exactly one JSON document goes to `out`; diagnostics go to `err`.
inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  detail::CliArgs a;
  CLI::App app{"Complexes of discrete Morse matchings: construction, homology and checks", "morsematch"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto common = [&](CLI::App* sub, bool variant) {
    sub->add_option("--complex", a.complex, "simplex:<n> | boundary:<n> | skeleton:<spec>:<k> | cone:<spec> | file:<path>");
    if (variant)
      sub->add_option("--variant", a.variant, "M, MP or GM")->check(CLI::IsMember({"M", "MP", "GM"}));
    sub->add_option("--relative", a.relative, "subcomplex for pair computations");
    sub->add_option("--threads", a.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--budget", a.budget, "search-node budget (0 = unlimited)");
    sub->add_option("--cache-dir", a.cache_dir, "cache directory (default: MORSEMATCH_CACHE or ~/.cache/morsematch)");
    sub->add_option("--out", a.out, "output file");
    sub->add_flag("--allow-long", a.allow_long, "permit long-running instances");
    sub->add_flag("--no-cache", a.no_cache, "neither read nor write the cache");
    sub->add_flag("--timing", a.timing, "include elapsed time in the output");
  };

  auto* build = app.add_subcommand("build", "materialize a matching complex");
  auto* fvector = app.add_subcommand("fvector", "f-vector of a matching complex");
  auto* homology_cmd = app.add_subcommand("homology", "integral homology of a matching complex or pair");
  auto* count = app.add_subcommand("count-optimal", "count optimal discrete Morse matchings");
  auto* verify = app.add_subcommand("verify", "run checks: a check name or 'all'");
  auto* euler = app.add_subcommand("euler", "Euler characteristic of a matching complex");
  for (auto* s : {build, fvector, homology_cmd, euler}) common(s, true);
  common(count, false);
  common(verify, false);
  homology_cmd->add_flag("--unreduced", a.unreduced, "unaugmented homology");
  verify->add_option("check", a.check, "check name or 'all'");
  verify->add_option("--max-n", a.max_n, "largest simplex dimension to run");
  verify->add_option("--n", a.n, "single instance dimension");
  verify->add_option("--w0", a.w0, "cone contiguity base vertex");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json envelope{{"command", command}, {"tool-version", kToolVersion}};
  int code = exit_ok;
  const auto t0 = std::chrono::steady_clock::now();
  auto fail = [&](int c, const std::string& kind, const std::string& msg) {
    err << "error: " << msg << '\n';
    envelope["error"] = {{"kind", kind}, {"message", msg}};
    envelope["result"] = nullptr;
    code = c;
  };
  try {
    if (command == "verify" && a.check != "all") {
      const auto& names = check_names();
      if (std::find(names.begin(), names.end(), a.check) == names.end())
        throw SpecError("unknown check '" + a.check + "'");
    }
    detail::Cli cli(a, err);
    if (command == "build") envelope["result"] = cli.cmd_build();
    else if (command == "fvector") envelope["result"] = cli.cmd_fvector(false);
    else if (command == "euler") envelope["result"] = cli.cmd_fvector(true);
    else if (command == "homology") envelope["result"] = cli.cmd_homology();
    else if (command == "count-optimal") envelope["result"] = cli.cmd_count_optimal();
    else envelope["result"] = cli.cmd_verify(code);
    envelope["spec"] = cli.spec_json(command);
  } catch (const BudgetExceeded& e) {
    fail(exit_budget, "budget", e.what());
  } catch (const ResourceLimitExceeded& e) {
    fail(exit_budget, "resource-limit", e.what());
  } catch (const std::invalid_argument& e) {
    fail(exit_usage, "usage", e.what());
  } catch (const std::exception& e) {
    fail(exit_failed, "internal", e.what());
  }
  if (a.timing)
    envelope["elapsed_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out << envelope.dump(2) << '\n';
  return code;
}

}  // namespace morsematch
