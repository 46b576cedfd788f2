#include "crjet/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "crjet/errors.hpp"
#include "crjet/parser.hpp"
#include "crjet/reflection.hpp"

namespace crjet {

namespace {

using Json = nlohmann::ordered_json;

struct InputFile {
  std::string role;
  std::string path;
  std::string text;
};

InputFile read_input(const std::string& role, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::input, "cannot read " + role + " file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return {role, path, os.str()};
}

Json point_json(const Point& p) {
  Json out = Json::array();
  for (const auto& c : p) out.push_back(c.to_string());
  return out;
}

std::vector<std::string> prefixed(const std::vector<std::string>& names, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(prefix + n);
  return out;
}

Json germ_json(const MapGerm& g, const std::vector<std::string>& vars) {
  Json comps = Json::array();
  for (const auto& c : g.components()) comps.push_back(format_polynomial(c, vars));
  return comps;
}

/// Jet data as polynomials in the displacement from its point: `dz` for a
/// jet of f, `d~z` for a jet of conj f(conj .).
Json jet_json(const JetAt& j, const std::vector<std::string>& source_names) {
  const auto vars = prefixed(source_names, j.conjugated ? "d~" : "d");
  return Json{{"point", point_json(j.point)},
              {"order", j.order},
              {"conjugated", j.conjugated},
              {"variables", vars},
              {"components", germ_json(j.germ, vars)}};
}

Json chain_json(const ChainPoint& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back(point_json(p));
  return Json{{"seed", c.seed}, {"attempt", c.attempt}, {"solved", c.solved}, {"points", pts}};
}

Json optional_json(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

Json context_json(const ReflectionContext& ctx) {
  return Json{{"r", ctx.r}, {"d", ctx.d}, {"s", ctx.s}, {"m", ctx.m}, {"k", ctx.k}};
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input:
    case ErrorKind::precondition:
      return kExitInput;
    case ErrorKind::rank:
    case ErrorKind::retry_exhausted:
    case ErrorKind::unsupported:
      return kExitInternal;
  }
  return kExitInternal;
}

/// Germ of the map file at its base, to at least `order`.
MapGerm map_germ(const MapSource& src, const ManifoldSpec& M, int order) {
  if (src.source_dim() != M.n) fail(ErrorKind::input, "map variables do not match the source manifold");
  if (!(src.base == M.base)) {
    fail(ErrorKind::input, "map base " + to_string(src.base) + " differs from the manifold base " + to_string(M.base));
  }
  MapGerm g = src.germ(order);
  if (g.order() < order) {
    fail(ErrorKind::input, "map file is truncated at order " + std::to_string(g.order()) + " but order " +
                               std::to_string(order) + " is needed");
  }
  return g;
}

struct Options {
  std::string manifold;
  std::string target;
  std::string map;
  std::string map2;
  std::string center;
  std::string chi;
  std::string at;
  int k_max = 10;
  int s_max = 4;
  int order = 1;
  int steps = 1;
  int samples = 3;
  std::uint64_t seed = 0;
  bool timing = false;
};

class Runner {
 public:
  explicit Runner(const Options& opt) : opt_(opt) {}

  Json& report() { return report_; }

  void start(const std::string& command) {
    report_["command"] = command;
    report_["inputs"] = Json::array();
    report_["seed"] = opt_.seed;
  }

  const std::string& load(const std::string& role, const std::string& path) {
    files_.push_back(read_input(role, path));
    report_["inputs"].push_back(Json{{"role", role}, {"path", path}, {"sha256", sha256_hex(files_.back().text)}});
    return files_.back().text;
  }

  int analyze() {
    start("analyze");
    const auto spec = parse_manifold(load("manifold", opt_.manifold));
    const auto a = crjet::analyze(spec, opt_.k_max, opt_.s_max, opt_.seed);
    const auto levi = levi_form(spec);
    Json forms = Json::array();
    for (const auto& h : levi.forms) {
      Json rows = Json::array();
      for (Index r = 0; r < h.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < h.cols(); ++c) row.push_back(h(r, c).to_string());
        rows.push_back(row);
      }
      forms.push_back(rows);
    }
    report_["result"] = Json{{"n", spec.n},
                             {"base", point_json(spec.base)},
                             {"is_generic", a.is_generic},
                             {"cr_dim", a.cr_dim},
                             {"cr_codim", a.cr_codim},
                             {"levi_forms", forms},
                             {"levi_nondegenerate", a.levi_nondegenerate},
                             {"levi_surjective", a.levi_surjective},
                             {"k_max", a.k_max},
                             {"nondeg_order", optional_json(a.nondeg_order)},
                             {"s_max", a.s_max},
                             {"minimal_s", optional_json(a.minimal_s)},
                             {"determinacy_order", optional_json(a.determinacy_order)}};
    return kExitOk;
  }

  int segre() {
    start("segre");
    auto spec = parse_manifold(load("manifold", opt_.manifold));
    if (!opt_.center.empty()) spec.base = parse_point(opt_.center);
    if (spec.base.size() != spec.n) fail(ErrorKind::input, "center has the wrong dimension");
    const Point chi = opt_.chi.empty() ? conj(spec.base) : parse_point(opt_.chi);
    if (chi.size() != spec.n) fail(ErrorKind::input, "conjugate center has the wrong dimension");
    const auto cx = complexify(spec);
    if (!on_complexification(cx, spec.base, chi)) {
      fail(ErrorKind::precondition, "(" + to_string(spec.base) + ", " + to_string(chi) + ") is not on the complexification");
    }
    const auto g = segre_graph(cx, spec.base, chi, opt_.order);

    std::vector<std::string> vars;
    Json free = Json::array();
    Json solved = Json::array();
    for (auto k : g.free) {
      vars.push_back("u_" + spec.names[k]);
      free.push_back(spec.names[k]);
    }
    for (const auto& name : spec.names) vars.push_back("c_" + name);
    Json graph = Json::object();
    for (std::size_t j = 0; j < g.solved.size(); ++j) {
      solved.push_back(spec.names[g.solved[j]]);
      graph[spec.names[g.solved[j]]] = format_polynomial(g.phi.component(j), vars);
    }
    Json result{{"center", point_json(spec.base)}, {"chi", point_json(chi)}, {"order", opt_.order},
                {"free", free},                    {"solved", solved},     {"variables", vars},
                {"graph", graph}};

    // Jet ranks need a point of M itself (chi = conj z).
    if (chi == conj(spec.base)) {
      Json ranks = Json::array();
      std::optional<int> nondeg;
      for (int k = 0; k <= opt_.order; ++k) {
        const auto jr = segre_jet_rank(spec, k);
        ranks.push_back(Json{{"k", k}, {"restricted_rank", jr.restricted_rank}, {"full_rank", jr.full_rank}});
        if (!nondeg && k >= 1 && jr.restricted_rank == spec.n - spec.d) nondeg = k;
      }
      result["jet_ranks"] = ranks;
      result["nondeg_order"] = optional_json(nondeg);
    }
    report_["result"] = result;
    return kExitOk;
  }

  int reflect() {
    start("reflect");
    const auto M = parse_manifold(load("source", opt_.manifold));
    const auto Mp = parse_manifold(load("target", opt_.target));
    const auto src = parse_map(load("map", opt_.map));
    if (opt_.steps < 1) fail(ErrorKind::input, "--steps must be at least 1");
    if (opt_.order < 0) fail(ErrorKind::input, "--order must be non-negative");
    const auto ctx = make_context(M, Mp, opt_.k_max);
    const int input = opt_.steps * ctx.r + opt_.order;
    const auto fj = jet_at(map_germ(src, M, input), input);
    const auto cx = complexify(M);

    Json attempts = Json::array();
    for (int attempt = 0; attempt < 8; ++attempt) {
      const auto chain = chain_sample(cx, M.base, opt_.steps, derive_seed(opt_.seed, static_cast<std::uint64_t>(attempt)));
      std::vector<JetAt> transcript;
      try {
        const auto end = reflect_chain(ctx, fj, chain, opt_.order, &transcript);
        Json steps = Json::array();
        for (const auto& j : transcript) steps.push_back(jet_json(j, M.names));
        report_["result"] = Json{{"context", context_json(ctx)},
                                 {"input_order", input},
                                 {"failed_chains", attempts},
                                 {"chain", chain_json(chain)},
                                 {"steps", steps},
                                 {"terminal", jet_json(end, M.names)}};
        return kExitOk;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::rank) throw;
        attempts.push_back(Json{{"chain", chain_json(chain)}, {"error", e.what()}});
      }
    }
    report_["result"] = Json{{"context", context_json(ctx)}, {"failed_chains", attempts}};
    fail(ErrorKind::retry_exhausted, "every sampled chain hit a rank failure");
  }

  int reconstruct() {
    start("reconstruct");
    const auto M = parse_manifold(load("source", opt_.manifold));
    const auto Mp = parse_manifold(load("target", opt_.target));
    const auto src = parse_map(load("map", opt_.map));
    const Point at = parse_point(opt_.at);
    const auto ctx = make_context(M, Mp, opt_.k_max);
    const auto kjet = jet_at(map_germ(src, M, ctx.k), ctx.k);
    const auto rec = reconstruct_at(ctx, kjet, at, opt_.seed);
    Json result{{"context", context_json(ctx)},
                {"at", point_json(at)},
                {"value", point_json(rec.value)},
                {"attempts", rec.attempts},
                {"chain", rec.chain.points.empty() ? Json(nullptr) : chain_json(rec.chain)}};
    int code = kExitOk;
    if (src.closed_form()) {
      const Point expected = src.evaluate(at);
      const bool equal = expected == rec.value;
      result["expected"] = point_json(expected);
      result["verdict"] = equal ? "equal" : "different";
      if (!equal) code = kExitNegative;
    } else {
      result["expected"] = nullptr;
      result["verdict"] = "unchecked";
    }
    report_["result"] = result;
    return code;
  }

  int verify() {
    start("verify");
    const auto M = parse_manifold(load("source", opt_.manifold));
    const auto Mp = parse_manifold(load("target", opt_.target));
    const auto src = parse_map(load("map", opt_.map));
    std::optional<MapSource> src2;
    if (!opt_.map2.empty()) src2 = parse_map(load("map2", opt_.map2));
    const auto ctx = make_context(M, Mp, opt_.k_max);

    Json result{{"context", context_json(ctx)}};
    const MapGerm f = map_germ(src, M, ctx.k);
    std::optional<MapGerm> g;
    if (src2) g = map_germ(*src2, M, ctx.k);

    bool admissible = true;
    Json adm = Json::array();
    for (const MapGerm* h : std::initializer_list<const MapGerm*>{&f, g ? &*g : nullptr}) {
      if (!h) continue;
      const auto a = admissibility(*h, M, Mp, min_order(ctx.k, h->order()));
      adm.push_back(Json{{"maps_into", a.maps_into}, {"tangent_onto", a.tangent_onto}, {"admissible", a.admissible()}});
      admissible = admissible && a.admissible();
    }
    result["admissibility"] = adm;
    result["admissibility_order"] = ctx.k;
    if (!admissible) {
      result["verdict"] = "inadmissible";
      report_["result"] = result;
      return kExitNegative;
    }

    if (g) {
      const auto rep = verify_determinacy(ctx, f, *g, static_cast<std::size_t>(opt_.samples), opt_.seed);
      Json samples = Json::array();
      for (const auto& s : rep.samples) {
        samples.push_back(Json{{"point", point_json(s.point)},
                               {"value_f", point_json(s.value_f)},
                               {"value_g", point_json(s.value_g)},
                               {"equal", s.equal}});
      }
      result["jets_equal"] = rep.jets_equal;
      result["first_difference"] = optional_json(rep.first_difference);
      result["samples"] = samples;
      result["reconstructions_equal"] = rep.reconstructions_equal;
      // Equal k-jets with different reconstructions would contradict determinacy.
      const bool consistent = !rep.jets_equal || rep.reconstructions_equal;
      result["verdict"] = !consistent ? "inconsistent" : rep.jets_equal ? "same_germ" : "distinct_germs";
      report_["result"] = result;
      return consistent ? kExitOk : kExitNegative;
    }

    const auto fj = jet_at(f, ctx.k);
    const auto points = sample_reachable_points(ctx, static_cast<std::size_t>(opt_.samples), opt_.seed);
    Json samples = Json::array();
    bool all_equal = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto rec = reconstruct_at(ctx, fj, points[i], derive_seed(opt_.seed, 1000 + i));
      Json s{{"point", point_json(points[i])}, {"value", point_json(rec.value)}, {"chain", chain_json(rec.chain)}};
      if (src.closed_form()) {
        const Point expected = src.evaluate(points[i]);
        s["expected"] = point_json(expected);
        s["equal"] = expected == rec.value;
        all_equal = all_equal && expected == rec.value;
      }
      samples.push_back(s);
    }
    result["samples"] = samples;
    result["verdict"] = !src.closed_form() ? "admissible" : all_equal ? "admissible_reconstructed" : "reconstruction_mismatch";
    report_["result"] = result;
    return all_equal ? kExitOk : kExitNegative;
  }

 private:
  const Options& opt_;
  Json report_ = Json::object();
  std::vector<InputFile> files_;
};

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Exact jet reflection and determinacy checks for real-algebraic CR manifolds", "crjet"};
  app.require_subcommand(1);
  app.add_option("--seed", opt.seed, "Seed for every random choice")->capture_default_str();
  app.add_flag("--timing", opt.timing, "Include the elapsed time in the report");

  auto* analyze = app.add_subcommand("analyze", "Genericity, Levi form, nondegeneracy and minimality");
  analyze->add_option("manifold", opt.manifold, "Manifold file")->required();
  analyze->add_option("--kmax", opt.k_max, "Largest nondegeneracy order searched")->capture_default_str();
  analyze->add_option("--smax", opt.s_max, "Largest Segre set order searched")->capture_default_str();

  auto* segre = app.add_subcommand("segre", "Segre graph and Segre jet-map ranks");
  segre->add_option("manifold", opt.manifold, "Manifold file")->required();
  segre->add_option("--order", opt.order, "Graph order and largest jet order")->required();
  segre->add_option("--center", opt.center, "Center point (default: the base point)");
  segre->add_option("--chi", opt.chi, "Conjugate center (default: conjugate of the center)");

  auto* reflect = app.add_subcommand("reflect", "Reflect a map jet along a sampled chain");
  reflect->add_option("source", opt.manifold, "Source manifold file")->required();
  reflect->add_option("target", opt.target, "Target manifold file")->required();
  reflect->add_option("--map", opt.map, "Map file")->required();
  reflect->add_option("--steps", opt.steps, "Chain length")->capture_default_str();
  reflect->add_option("--order", opt.order, "Order of the terminal jet")->capture_default_str();
  reflect->add_option("--kmax", opt.k_max, "Largest nondegeneracy order searched on the target")->capture_default_str();

  auto* reconstruct = app.add_subcommand("reconstruct", "Map value at a point from the determining jet");
  reconstruct->add_option("source", opt.manifold, "Source manifold file")->required();
  reconstruct->add_option("target", opt.target, "Target manifold file")->required();
  reconstruct->add_option("--map", opt.map, "Map file")->required();
  reconstruct->add_option("--at", opt.at, "Point of the source manifold, e.g. \"(1/3, 1/5)\"")->required();
  reconstruct->add_option("--kmax", opt.k_max, "Largest nondegeneracy order searched on the target")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Admissibility and determinacy checks");
  verify->add_option("source", opt.manifold, "Source manifold file")->required();
  verify->add_option("target", opt.target, "Target manifold file")->required();
  verify->add_option("--map", opt.map, "Map file")->required();
  verify->add_option("--map2", opt.map2, "Second map to compare with");
  verify->add_option("--samples", opt.samples, "Reachable points to reconstruct at")->capture_default_str();
  verify->add_option("--kmax", opt.k_max, "Largest nondegeneracy order searched on the target")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    write_json(out, Json{{"error", Json{{"kind", "usage"}, {"message", e.what()}}}});
    return kExitInput;
  }

  Runner runner(opt);
  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (*analyze) {
      code = runner.analyze();
    } else if (*segre) {
      code = runner.segre();
    } else if (*reflect) {
      code = runner.reflect();
    } else if (*reconstruct) {
      code = runner.reconstruct();
    } else {
      code = runner.verify();
    }
  } catch (const ParseError& e) {
    Json error{{"kind", to_string(e.kind())}, {"message", e.what()}, {"line", e.line()}, {"column", e.column()},
               {"token", e.token()}};
    runner.report()["error"] = error;
    code = kExitInput;
  } catch (const Error& e) {
    runner.report()["error"] = Json{{"kind", to_string(e.kind())}, {"message", e.what()}};
    code = exit_code(e.kind());
  }
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (opt.timing) runner.report()["timing_ms"] = ms;
  write_json(out, runner.report());
  if (runner.report().contains("error")) err << "crjet: " << runner.report()["error"]["message"].get<std::string>() << '\n';
  err << "crjet: finished in " << std::fixed << std::setprecision(1) << ms << " ms\n";
  return code;
}

}  // namespace crjet
