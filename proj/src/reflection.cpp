#include "crjet/reflection.hpp"

#include <algorithm>

#include "crjet/errors.hpp"

namespace crjet {

namespace {

std::vector<std::size_t> range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> out;
  for (std::size_t k = begin; k < end; ++k) out.push_back(k);
  return out;
}

// conj f(conj chi) at a pair (z, chi), from the image of the source Segre
// variety Q_chi: every point of it lands on the target Segre variety of the
// unknown value, which is linear in that value when the target equations
// are affine in the conjugate variables.
Point conjugate_value(const Complexification& target, const MapGerm& image_on_q, int r) {
  const std::size_t np = target.spec.n;
  const std::size_t p = image_on_q.source_dim();
  std::vector<TruncatedSeries> inner;
  for (const auto& c : image_on_q.components()) inner.push_back(c.truncated(r));
  for (std::size_t k = 0; k < np; ++k) inner.push_back(TruncatedSeries(p, r));

  const auto alphas = multi_indices(p, static_cast<unsigned>(r));
  const auto rows = static_cast<Index>(target.spec.d * alphas.size());
  CMatrix a(rows, static_cast<Index>(np));
  CVector rhs(rows);
  Index row = 0;
  for (const auto& rho : target.rho_c) {
    const TruncatedSeries constant = substitute(rho, inner);
    std::vector<TruncatedSeries> slopes;
    for (std::size_t k = 0; k < np; ++k) slopes.push_back(substitute(derive(rho, np + k), inner));
    for (const auto& alpha : alphas) {
      rhs(row) = -constant.coeff(alpha);
      for (std::size_t k = 0; k < np; ++k) a(row, static_cast<Index>(k)) = slopes[k].coeff(alpha);
      ++row;
    }
  }
  if (static_cast<std::size_t>(rank(a)) < np) {
    fail(ErrorKind::rank, "the image of the source Segre variety does not determine the target Segre variety");
  }
  const auto x = solve(a, rhs);
  if (!x) fail(ErrorKind::precondition, "the map does not send the source Segre variety into a target Segre variety");
  return {x->begin(), x->end()};
}

std::string step_prefix(std::size_t step) { return "chain step " + std::to_string(step) + ": "; }

}  // namespace

ReflectionContext make_context_with_order(const ManifoldSpec& M, const ManifoldSpec& Mp, int r) {
  if (r < 1) fail(ErrorKind::input, "nondegeneracy order must be positive");
  ReflectionContext ctx;
  ctx.M = M;
  ctx.Mp = Mp;
  ctx.r = r;
  ctx.d = M.d;
  ctx.s = static_cast<int>(M.d) + 1;
  ctx.m = ctx.s * r;
  ctx.k = 2 * ctx.m;
  return ctx;
}

ReflectionContext make_context(const ManifoldSpec& M, const ManifoldSpec& Mp, int k_max) {
  const auto r = nondegeneracy_order(Mp, k_max);
  if (!r) {
    fail(ErrorKind::precondition, "target manifold is not k-nondegenerate for any k <= " + std::to_string(k_max));
  }
  return make_context_with_order(M, Mp, *r);
}

int determinacy_order(int r, std::size_t d) { return 2 * r * (1 + static_cast<int>(d)); }

int determinacy_order(const ReflectionContext& ctx) { return determinacy_order(ctx.r, ctx.d); }

JetAt jet_at(const MapGerm& germ, int order) {
  if (germ.order() < order) {
    fail(ErrorKind::precondition, "germ of order " + std::to_string(germ.order()) + " cannot supply a jet of order " +
                                      std::to_string(order));
  }
  return {germ.base(), order, germ.truncated(order), false};
}

JetAt reflect_jet(const ReflectionContext& ctx, const JetAt& fj, const Point& z, const Point& chi, int l) {
  const int r = ctx.r;
  const int K = l + r;
  if (l < 0) fail(ErrorKind::input, "reflection output order must be non-negative");
  if (fj.conjugated) fail(ErrorKind::input, "reflect_jet takes the jet of the map itself, not of its conjugate");
  if (fj.order < K) {
    fail(ErrorKind::precondition, "input jet order " + std::to_string(fj.order) + " is " + std::to_string(K - fj.order) +
                                      " short of l + r = " + std::to_string(K));
  }
  if (!(fj.point == z) || !(fj.germ.base() == z)) fail(ErrorKind::input, "input jet is not based at the pair's z-point");

  const auto cx = complexify(ctx.M);
  const auto cxp = complexify(ctx.Mp);
  const std::size_t n = ctx.M.n;
  const std::size_t np = ctx.Mp.n;
  const std::size_t pp = np - ctx.Mp.d;
  const std::vector<std::size_t> chi_vars_p = range(np, 2 * np);
  for (const auto& rho : cxp.rho_c) {
    if (partial_degree(rho, chi_vars_p) > 1) {
      fail(ErrorKind::unsupported, "reflection needs target equations affine in the conjugate variables");
    }
  }

  // Source Segre graph: z = (z_F + du, phi(du, dchi)).
  const auto graph = segre_graph(cx, z, chi, K);
  const std::size_t p = graph.free.size();
  const std::size_t nv = p + n;
  Point pbase;
  for (std::size_t k : graph.free) pbase.push_back(z[k]);
  pbase.insert(pbase.end(), chi.begin(), chi.end());
  std::vector<TruncatedSeries> zc(n);
  for (std::size_t k = 0; k < p; ++k) {
    zc[graph.free[k]] = TruncatedSeries::variable(nv, k, K) + TruncatedSeries::constant(nv, K, z[graph.free[k]]);
  }
  for (std::size_t k = 0; k < graph.solved.size(); ++k) zc[graph.solved[k]] = graph.phi.component(k);
  const MapGerm image = compose(fj.germ.truncated(K), MapGerm(pbase, zc));
  const Point a = image.value();

  // Value of the conjugate map at chi, from the image of Q_chi.
  std::vector<TruncatedSeries> on_q;
  const auto u_vars = range(0, p);
  for (const auto& c : image.components()) on_q.push_back(restrict_to(c, u_vars));
  const Point chi_p0 = conjugate_value(cxp, MapGerm(Point(pbase.begin(), pbase.begin() + static_cast<std::ptrdiff_t>(p)), on_q), r);
  if (!on_complexification(cxp, a, chi_p0)) {
    fail(ErrorKind::precondition, "image pair is not on the target complexification");
  }

  // Target splitting and the source directions mapping onto its free part.
  const auto tsolved = graph_split(cxp, a, chi_p0);
  std::vector<std::size_t> tfree;
  for (std::size_t k = 0; k < np; ++k) {
    if (std::find(tsolved.begin(), tsolved.end(), k) == tsolved.end()) tfree.push_back(k);
  }
  const CMatrix jac = image.jacobian();
  CMatrix onto(static_cast<Index>(pp), static_cast<Index>(p));
  for (std::size_t i = 0; i < pp; ++i) {
    for (std::size_t k = 0; k < p; ++k) onto(static_cast<Index>(i), static_cast<Index>(k)) = jac(static_cast<Index>(tfree[i]), static_cast<Index>(k));
  }
  const auto cols = pivot_columns(onto);
  if (cols.size() < pp) {
    fail(ErrorKind::rank, "the map restricted to the source Segre variety is not onto the target free directions at " +
                              to_string(z));
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pp; ++i) kept.push_back(static_cast<std::size_t>(cols[i]));
  for (std::size_t b = 0; b < n; ++b) kept.push_back(p + b);
  Point kbase;
  for (std::size_t v : kept) kbase.push_back(pbase[v]);
  std::vector<TruncatedSeries> restricted;
  for (const auto& c : image.components()) restricted.push_back(restrict_to(c, kept));
  const MapGerm img(kbase, restricted);

  // T(du1, dchi) = (image_F', chi); its inverse rewrites the image of Q_chi
  // as a graph over the target free coordinates.
  const std::size_t tv = pp + n;
  std::vector<TruncatedSeries> tc;
  for (std::size_t k : tfree) tc.push_back(img.component(k));
  for (std::size_t b = 0; b < n; ++b) {
    tc.push_back(TruncatedSeries::variable(tv, pp + b, K) + TruncatedSeries::constant(tv, K, chi[b]));
  }
  const MapGerm tinv = comp_inverse(MapGerm(kbase, tc), K);
  const MapGerm graph_image = compose(img.select(tsolved), tinv);

  // Coefficients of the r-jet of that graph, as series in dchi.
  const auto split = range(0, pp);
  const auto alphas = multi_indices(pp, static_cast<unsigned>(r));
  std::vector<TruncatedSeries> psi_c;
  for (const auto& c : graph_image.components()) {
    for (const auto& alpha : alphas) psi_c.push_back(coefficient_of(c, split, alpha).truncated(l));
  }
  const MapGerm psi(chi, psi_c);

  // The immersion test needs first-order terms even when l = 0.
  const auto jq = jet_of_segre(cxp, a, chi_p0, r, std::max(l, 1));
  if (!(jq.map.value() == psi.value())) {
    fail(ErrorKind::precondition, "image Segre jet does not match the target Segre jet at " + to_string(a));
  }
  const auto left = left_inverse_jetQ(jq, std::max(l, 1));
  const MapGerm out = compose(left.germ, psi.select(left.rows));
  if (!(compose(jq.map, out) == psi)) {
    fail(ErrorKind::precondition, "reflected jet is inconsistent with the target Segre family (map not admissible?)");
  }
  return {chi, l, out, true};
}

JetAt reflect_chain(const ReflectionContext& ctx, const JetAt& fj, const ChainPoint& chain, int l,
                    std::vector<JetAt>* transcript) {
  const std::size_t steps = chain.length();
  const int need = static_cast<int>(steps) * ctx.r + l;
  if (fj.order < need) {
    fail(ErrorKind::precondition, "chain of " + std::to_string(steps) + " steps needs jet order " + std::to_string(need) +
                                      ", got " + std::to_string(fj.order));
  }
  if (fj.conjugated || chain.points.empty() || !(fj.point == chain.points.front())) {
    fail(ErrorKind::input, "chain must start at the point of the input jet");
  }
  JetAt cur{fj.point, need, fj.germ.truncated(need), false};
  for (std::size_t i = 1; i <= steps; ++i) {
    const Point& from = chain.points[i - 1];
    const Point& to = chain.points[i];
    const int out_order = cur.order - ctx.r;
    try {
      if (!cur.conjugated) {
        cur = reflect_jet(ctx, cur, from, to, out_order);
      } else {
        const JetAt flipped{conj(from), cur.order, conjugate(cur.germ), false};
        const JetAt back = reflect_jet(ctx, flipped, conj(from), conj(to), out_order);
        cur = JetAt{to, back.order, conjugate(back.germ), false};
      }
    } catch (const Error& e) {
      throw Error(e.kind(), step_prefix(i) + e.what());
    }
    if (cur.order != out_order) throw std::logic_error("order ledger violated in reflect_chain");
    if (transcript) transcript->push_back(cur);
  }
  return cur;
}

Reconstruction reconstruct_at(const ReflectionContext& ctx, const JetAt& kjet, const Point& target, std::uint64_t seed,
                              int retries) {
  if (kjet.conjugated || !(kjet.point == ctx.M.base)) fail(ErrorKind::input, "reconstruction needs the jet at the base point");
  if (kjet.order < ctx.k) {
    fail(ErrorKind::precondition, "reconstruction needs a jet of order " + std::to_string(ctx.k) + ", got " +
                                      std::to_string(kjet.order));
  }
  if (target.size() != ctx.M.n) fail(ErrorKind::input, "target point has the wrong dimension");
  Reconstruction out;
  if (target == ctx.M.base) {
    out.value = kjet.germ.value();
    return out;
  }
  const auto cx = complexify(ctx.M);
  std::string last_failure = "no chain could be joined to the target";
  for (int attempt = 0; attempt < retries; ++attempt) {
    ++out.attempts;
    auto chain = chain_to(cx, ctx.M.base, target, 2 * ctx.s, seed, attempt);
    if (!chain) continue;
    try {
      const JetAt end = reflect_chain(ctx, kjet, *chain, 0);
      out.value = end.germ.value();
      out.chain = std::move(*chain);
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::rank) throw;
      last_failure = e.what();
    }
  }
  fail(ErrorKind::retry_exhausted, "target " + to_string(target) + " not reached after " + std::to_string(retries) +
                                       " chains; last failure: " + last_failure);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<Point> sample_reachable_points(const ReflectionContext& ctx, std::size_t count, std::uint64_t seed) {
  const auto cx = complexify(ctx.M);
  std::vector<Point> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(chain_sample(cx, ctx.M.base, 2 * ctx.s, derive_seed(seed, i)).points.back());
  }
  return out;
}

DeterminacyReport verify_determinacy(const ReflectionContext& ctx, const MapGerm& f, const MapGerm& g,
                                     std::size_t sample_count, std::uint64_t seed) {
  if (!(f.base() == g.base())) fail(ErrorKind::input, "maps have different base points");
  for (const MapGerm* h : {&f, &g}) {
    if (!check_admissible(*h, ctx.M, ctx.Mp, min_order(ctx.k, h->order()))) {
      fail(ErrorKind::precondition, "map is not admissible");
    }
  }
  DeterminacyReport report;
  report.k = ctx.k;
  const MapGerm fk = f.truncated(ctx.k);
  const MapGerm gk = g.truncated(ctx.k);
  report.jets_equal = fk == gk;
  if (!report.jets_equal) {
    for (int deg = 0; deg <= ctx.k && !report.first_difference; ++deg) {
      for (std::size_t c = 0; c < fk.target_dim(); ++c) {
        if (!(fk.component(c).homogeneous(static_cast<unsigned>(deg)) ==
              gk.component(c).homogeneous(static_cast<unsigned>(deg)))) {
          report.first_difference = deg;
          break;
        }
      }
    }
  }
  const JetAt fj = jet_at(f, ctx.k);
  const JetAt gj = jet_at(g, ctx.k);
  report.reconstructions_equal = true;
  const auto points = sample_reachable_points(ctx, sample_count, seed);
  for (std::size_t i = 0; i < points.size(); ++i) {
    DeterminacySample sample;
    sample.point = points[i];
    sample.value_f = reconstruct_at(ctx, fj, points[i], derive_seed(seed, 1000 + i)).value;
    sample.value_g = reconstruct_at(ctx, gj, points[i], derive_seed(seed, 1000 + i)).value;
    sample.equal = sample.value_f == sample.value_g;
    report.reconstructions_equal = report.reconstructions_equal && sample.equal;
    report.samples.push_back(std::move(sample));
  }
  return report;
}

}  // namespace crjet
