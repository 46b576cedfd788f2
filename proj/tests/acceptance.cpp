// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "crjet/cli.hpp"
#include "crjet/errors.hpp"
#include "crjet/reflection.hpp"
#include "fixtures.hpp"

using namespace crjet;
using GR = GaussianRational;
using Json = nlohmann::json;

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kHeisMaps = {"heis_identity.map", "heis_dilation.map", "heis_rotation.map",
                                            "heis_translation.map", "fmob.map"};

std::string fx(const std::string& name) { return std::string(CRJET_FIXTURES) + "/" + name; }

struct CliRun {
  int code;
  Json json;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, Json::parse(out.str())};
}

/// Failures collected by one criterion; printed indented under its line.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

/// Writes a map file holding only the order-`order` truncation of `src`.
std::string write_truncation(const MapSource& src, int order, const std::string& stem) {
  const fs::path dir = fs::path(CRJET_SCRATCH);
  fs::create_directories(dir);
  const MapGerm g = src.germ(order);
  std::ostringstream os;
  os << "vars";
  for (const auto& v : src.vars) os << ' ' << v;
  os << "\nbase " << to_string(src.base) << "\norder " << order << '\n';
  for (std::size_t c = 0; c < g.target_dim(); ++c) {
    // Components are series in the displacement; the base here is the origin.
    os << 'f' << c + 1 << ": " << format_polynomial(g.component(c), src.vars) << '\n';
  }
  const fs::path path = dir / (stem + ".trunc" + std::to_string(order) + ".map");
  std::ofstream(path) << os.str();
  return path.string();
}

// 1. Reconstruction of every Heisenberg fixture automorphism from its order-4 jet.
void heisenberg_reconstruction(Check& c) {
  const auto heis = load_manifold("heis.cr");
  const auto ctx = make_context(heis, heis);
  c.expect(ctx.k == 4, "k = " + std::to_string(ctx.k));
  const auto points = sample_reachable_points(ctx, 10, 2024);
  for (const auto& name : kHeisMaps) {
    const auto src = load_map(name);
    const std::string trunc = write_truncation(src, ctx.k, name);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto r = cli({"--seed", std::to_string(i), "reconstruct", fx("heis.cr"), fx("heis.cr"), "--map", trunc,
                          "--at", to_string(points[i])});
      const Point expected = src.evaluate(points[i]);
      Json want = Json::array();
      for (const auto& e : expected) want.push_back(e.to_string());
      const bool ok = r.code == 0 && r.json["result"]["value"] == want;
      c.expect(ok, name + " at " + to_string(points[i]) + ": got " +
                       (r.json.contains("error") ? r.json["error"].dump() : r.json["result"]["value"].dump()));
    }
  }
}

// 2. One reflection of f_MOB from 0 to the conjugate point (1, 0).
void one_step_reflection(Check& c) {
  const auto heis = load_manifold("heis.cr");
  const auto ctx = make_context(heis, heis);
  const auto fmob = load_map("fmob.map");
  const auto out = reflect_jet(ctx, jet_at(fmob.germ(2), 2), Point{0, 0}, Point{1, 0}, 1);
  c.expect(out.germ.value() == Point{1, 0}, "value " + to_string(out.germ.value()));
  const CMatrix j = out.germ.jacobian();
  const bool jac = j.rows() == 2 && j.cols() == 2 && j(0, 0) == GR(1) && j(0, 1) == GR(1) && j(1, 0) == GR(0) &&
                   j(1, 1) == GR(1);
  c.expect(jac, "Jacobian differs from [[1,1],[0,1]]");
}

// 3. Levi nondegeneracy agrees with 1-nondegeneracy on quadrics.
void levi_equivalence(Check& c) {
  const std::vector<std::string> quadrics = {"heis.cr", "ex41.cr", "ex41p.cr", "levi_flat.cr", "quadric_c3.cr",
                                             "ex42.cr"};
  for (const auto& name : quadrics) {
    const auto spec = load_manifold(name);
    const bool levi = levi_tests(levi_form(spec)).nondegenerate;
    const bool one = nondegeneracy_order(spec, 3) == 1;
    c.expect(levi == one, name + ": Levi " + std::to_string(levi) + ", order-1 " + std::to_string(one));
  }
}

// 4. The first example: dimensions, Levi properties, admissible projection.
void example_projection(Check& c) {
  const auto m = cli({"analyze", fx("ex41.cr")});
  const auto mp = cli({"analyze", fx("ex41p.cr")});
  c.expect(m.code == 0 && mp.code == 0, "analyze failed");
  const auto& a = m.json["result"];
  const auto& ap = mp.json["result"];
  c.expect(a["cr_dim"] == 2 && a["cr_codim"] == 2, "M dimensions");
  c.expect(ap["cr_dim"] == 2 && ap["cr_codim"] == 2, "M' dimensions");
  c.expect(a["levi_surjective"] == true, "Levi form of M not surjective");
  c.expect(ap["levi_nondegenerate"] == true, "Levi form of M' degenerate");
  c.expect(ap["levi_surjective"] == false, "Levi form of M' surjective");
  const auto v = cli({"verify", fx("ex41.cr"), fx("ex41p.cr"), "--map", fx("ex41_proj.map"), "--samples", "2"});
  c.expect(v.code == 0, "verify exit code " + std::to_string(v.code));
  c.expect(v.json.contains("result") && v.json["result"]["admissibility"][0]["admissible"] == true,
           "projection not admissible");
}

// 5. The second example: a complex line in M, and the collapse map rejected.
void example_collapse(Check& c) {
  const auto ex42 = load_manifold("ex42.cr");
  const auto t = TruncatedSeries::variable(1, 0, kExactOrder);
  const auto one = TruncatedSeries::constant(1, kExactOrder, GR(1));
  c.expect(contains_curve(ex42, {one, t, t}), "line z1 = 1, z2 = z3 not contained");
  const auto v = cli({"verify", fx("ex42.cr"), fx("ex42.cr"), "--map", fx("ex42_collapse.map")});
  c.expect(v.code == 1, "verify exit code " + std::to_string(v.code));
  c.expect(v.json.contains("result") && v.json["result"]["admissibility"][0]["tangent_onto"] == false,
           "collapse map passes the tangent condition");
}

// 6. Coefficients above order 4 never reach the reconstruction.
void jet_sufficiency(Check& c) {
  const auto heis = load_manifold("heis.cr");
  const auto ctx = make_context(heis, heis);
  const auto f = load_map("fmob.map").germ(6);
  const auto points = sample_reachable_points(ctx, 3, 99);
  std::vector<Point> base_values;
  for (std::size_t i = 0; i < points.size(); ++i) {
    base_values.push_back(reconstruct_at(ctx, jet_at(f, 6), points[i], i).value);
  }
  int perturbations = 0;
  for (unsigned deg = 5; deg <= 6; ++deg) {
    for (const auto& md : multi_indices(2, deg)) {
      if (md.total() != deg) continue;
      for (std::size_t comp = 0; comp < 2; ++comp) {
        auto comps = f.components();
        comps[comp].add_term(md, GR(3, -2));
        const MapGerm g(f.base(), comps);
        ++perturbations;
        for (std::size_t i = 0; i < points.size(); ++i) {
          const Point v = reconstruct_at(ctx, jet_at(g, 6), points[i], i).value;
          c.expect(v == base_values[i], "perturbation changed the value at " + to_string(points[i]));
        }
      }
    }
  }
  c.expect(perturbations == 26, "expected 26 perturbations, ran " + std::to_string(perturbations));
}

TruncatedSeries random_series(std::mt19937_64& rng, std::size_t nvars, int order, unsigned min_deg, int terms) {
  TruncatedSeries s(nvars, order);
  const auto mds = multi_indices(nvars, static_cast<unsigned>(order));
  for (int t = 0; t < terms; ++t) {
    const auto& md = mds[rng() % mds.size()];
    if (md.total() < min_deg) continue;
    s.add_term(md, random_gaussian(rng, 3));
  }
  return s;
}

// 7. Randomized series identities.
void series_soundness(Check& c) {
  const int N = 8;
  int inverses = 0;
  int solves = 0;
  for (std::uint64_t trial = 0; (inverses < 100 || solves < 100) && trial < 1000; ++trial) {
    auto rng = make_rng(77, trial);
    const std::size_t n = 1 + rng() % 3;
    Point base;
    for (std::size_t k = 0; k < n; ++k) base.push_back(random_gaussian(rng, 2));

    // Square germ: invertible linear part plus sparse higher terms.
    std::vector<TruncatedSeries> comps;
    for (std::size_t k = 0; k < n; ++k) {
      auto s = TruncatedSeries::constant(n, N, random_gaussian(rng, 2)) + TruncatedSeries::variable(n, k, N);
      s += random_series(rng, n, N, 1, 2);
      s += random_series(rng, n, N, 2, 3);
      comps.push_back(s);
    }
    const MapGerm g(base, comps);
    if (inverses < 100 && rank(g.jacobian()) == static_cast<Index>(n)) {
      ++inverses;
      const MapGerm inv = comp_inverse(g);
      c.expect(compose(inv, g) == MapGerm::identity(base, N), "inverse-after identity, trial " + std::to_string(trial));
      c.expect(compose(g, inv) == MapGerm::identity(g.value(), N),
               "inverse-before identity, trial " + std::to_string(trial));
    }

    // F(u, v) with m free and q solved variables, vanishing at the base.
    const std::size_t m = rng() % 3;
    const std::size_t q = 1 + rng() % (3 - m);
    const std::size_t nv = m + q;
    Point fbase;
    for (std::size_t k = 0; k < nv; ++k) fbase.push_back(random_gaussian(rng, 2));
    std::vector<TruncatedSeries> fc;
    for (std::size_t k = 0; k < q; ++k) {
      auto s = TruncatedSeries::variable(nv, m + k, N) + random_series(rng, nv, N, 1, 2) + random_series(rng, nv, N, 2, 3);
      s.add_term(Multidegree(nv), -s.coeff(Multidegree(nv)));
      fc.push_back(s);
    }
    const MapGerm F(fbase, fc);
    CMatrix dv(static_cast<Index>(q), static_cast<Index>(q));
    const CMatrix jf = F.jacobian();
    for (std::size_t k = 0; k < q; ++k) dv.col(static_cast<Index>(k)) = jf.col(static_cast<Index>(m + k));
    if (solves >= 100 || rank(dv) < static_cast<Index>(q)) continue;
    ++solves;
    const MapGerm h = implicit_solve(F, m);
    const Point ubase(fbase.begin(), fbase.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<TruncatedSeries> graph;
    for (std::size_t k = 0; k < m; ++k) {
      graph.push_back(TruncatedSeries::constant(m, N, fbase[k]) + TruncatedSeries::variable(m, k, N));
    }
    for (const auto& hc : h.components()) graph.push_back(hc);
    const MapGerm residual = compose(F, MapGerm(ubase, graph));
    bool zero = residual.order() >= N;
    for (const auto& r : residual.components()) zero = zero && r.is_zero();
    c.expect(zero, "implicit_solve residual, trial " + std::to_string(trial));
  }
  c.expect(inverses == 100 && solves == 100,
           "ran " + std::to_string(inverses) + " inversions and " + std::to_string(solves) + " solves");
}

// 8. Segre symmetry, exact graphs, and the Heisenberg ranks.
void segre_properties(Check& c) {
  const std::vector<std::string> fixtures = {"heis.cr", "ex41.cr", "ex41p.cr", "ex42.cr", "quadric_c3.cr", "cubic_c3.cr",
                                             "levi_flat.cr"};
  for (const auto& name : fixtures) {
    const auto spec = load_manifold(name);
    const auto cx = complexify(spec);
    int pairs = 0;
    for (std::uint64_t seed = 0; pairs < 50; ++seed) {
      const auto chain = chain_sample(cx, spec.base, 4, seed);
      for (std::size_t i = 1; i < chain.points.size(); ++i) {
        const bool conj_slot = ChainPoint::is_conjugate_slot(i);
        const Point& z = conj_slot ? chain.points[i - 1] : chain.points[i];
        const Point& chi = conj_slot ? chain.points[i] : chain.points[i - 1];
        // z in Q_w with w = conj chi, and w in Q_z.
        c.expect(on_complexification(cx, z, chi) && on_complexification(cx, conj(chi), conj(z)),
                 name + ": asymmetric pair");
        ++pairs;
      }
    }
    const auto g = segre_graph(cx, spec.base, conj(spec.base), 6);
    for (const auto& r : graph_residual(cx, g)) c.expect(r.is_zero() && r.order() >= 6, name + ": graph residual");
  }
  const auto heis = load_manifold("heis.cr");
  const auto hx = complexify(heis);
  c.expect(segre_set_rank(hx, heis.base, 1, 0) == 1, "HEIS s=1 rank");
  c.expect(segre_set_rank(hx, heis.base, 2, 0) == 2, "HEIS s=2 rank");
  c.expect(minimality_order(heis, 4, 0) == 2, "HEIS minimality certificate");
}

// 9. Reflecting out and back returns the input jet, two orders shorter.
void double_reflection(Check& c) {
  const auto heis = load_manifold("heis.cr");
  const auto ctx = make_context(heis, heis);
  const auto cx = complexify(heis);
  std::vector<std::string> maps = kHeisMaps;
  maps.push_back("heis_dilation3.map");
  for (const auto& name : maps) {
    auto src = load_map(name);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto sample = chain_sample(cx, heis.base, 1, seed);
      ChainPoint back;
      back.points = {heis.base, sample.points[1], heis.base};
      const int input = 6;
      const auto fj = jet_at(src.germ(input), input);
      const auto out = reflect_chain(ctx, fj, back, input - 2 * ctx.r);
      c.expect(out.germ == fj.germ.truncated(input - 2 * ctx.r) && !out.conjugated,
               name + " through " + to_string(sample.points[1]));
    }
  }
}

struct Criterion {
  int id;
  std::string title;
  double limit_s;
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Heisenberg reconstruction from order-4 jets", 60, heisenberg_reconstruction},
      {2, "one-step reflection oracle for f_MOB", 0, one_step_reflection},
      {3, "Levi nondegeneracy equals 1-nondegeneracy on quadrics", 0, levi_equivalence},
      {4, "projection example: dimensions, Levi tests, admissibility", 0, example_projection},
      {5, "collapse example: complex line and rejected map", 0, example_collapse},
      {6, "jet sufficiency under order 5 and 6 perturbations", 30, jet_sufficiency},
      {7, "series engine identities on 100 random instances", 30, series_soundness},
      {8, "Segre symmetry, graph residuals, Heisenberg ranks", 0, segre_properties},
      {9, "double reflection returns the truncated jet", 0, double_reflection},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit_s > 0 && secs > cr.limit_s) {
      std::ostringstream os;
      os << "took " << secs << " s, limit " << cr.limit_s << " s";
      check.failures.push_back(os.str());
    }
    const bool ok = check.failures.empty();
    failed += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << cr.id << ": " << cr.title << " (" << std::fixed
              << std::setprecision(2) << secs << " s)\n";
    for (std::size_t i = 0; i < check.failures.size() && i < 10; ++i) std::cout << "      " << check.failures[i] << '\n';
    if (check.failures.size() > 10) std::cout << "      ... " << check.failures.size() - 10 << " more\n";
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
