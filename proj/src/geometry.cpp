#include "crjet/geometry.hpp"

#include <stdexcept>

#include "crjet/errors.hpp"
#include "crjet/segre.hpp"

namespace crjet {

namespace {

Point concat(const Point& a, const Point& b) {
  Point out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

CMatrix partials(const ManifoldSpec& spec, const Point& z, const Point& chi, std::size_t offset) {
  const Point at = concat(z, chi);
  CMatrix out(static_cast<Index>(spec.d), static_cast<Index>(spec.n));
  for (std::size_t j = 0; j < spec.d; ++j) {
    for (std::size_t a = 0; a < spec.n; ++a) {
      out(static_cast<Index>(j), static_cast<Index>(a)) = derive(spec.rho[j], offset + a).evaluate(at);
    }
  }
  return out;
}

}  // namespace

ManifoldSpec make_spec(Point base, std::vector<TruncatedSeries> rho, std::vector<std::string> names) {
  ManifoldSpec spec;
  spec.n = base.size();
  spec.d = rho.size();
  spec.base = std::move(base);
  spec.rho = std::move(rho);
  if (names.empty()) {
    for (std::size_t k = 0; k < spec.n; ++k) names.push_back(variable_name(k));
  }
  spec.names = std::move(names);
  return spec;
}

Point evaluate_rho(const ManifoldSpec& spec, const Point& z, const Point& chi) {
  const Point at = concat(z, chi);
  Point out;
  out.reserve(spec.d);
  for (const auto& r : spec.rho) out.push_back(r.evaluate(at));
  return out;
}

CMatrix dz_matrix(const ManifoldSpec& spec, const Point& z, const Point& chi) { return partials(spec, z, chi, 0); }

CMatrix dchi_matrix(const ManifoldSpec& spec, const Point& z, const Point& chi) {
  return partials(spec, z, chi, spec.n);
}

bool reality_symmetric(const TruncatedSeries& rho, std::size_t n) {
  if (rho.nvars() != 2 * n) return false;
  for (const auto& [md, c] : rho.terms()) {
    std::vector<unsigned> swapped(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      swapped[k] = md[n + k];
      swapped[n + k] = md[k];
    }
    if (!(rho.coeff(Multidegree(std::move(swapped))) == conj(c))) return false;
  }
  return true;
}

AnalysisReport validate_spec(const ManifoldSpec& spec) {
  if (spec.base.size() != spec.n) fail(ErrorKind::input, "base point has the wrong dimension");
  if (spec.rho.size() != spec.d || spec.d == 0) fail(ErrorKind::input, "expected at least one defining function");
  if (spec.d > spec.n) fail(ErrorKind::input, "more defining functions than coordinates");
  for (std::size_t j = 0; j < spec.d; ++j) {
    if (spec.rho[j].nvars() != 2 * spec.n || !spec.rho[j].is_exact()) {
      fail(ErrorKind::input, "rho" + std::to_string(j + 1) + " must be a polynomial in z and its conjugate");
    }
    if (!reality_symmetric(spec.rho[j], spec.n)) {
      fail(ErrorKind::input, "rho" + std::to_string(j + 1) + " is not real-valued (coefficient symmetry fails)");
    }
  }
  const Point xbar = conj(spec.base);
  const Point at_base = evaluate_rho(spec, spec.base, xbar);
  for (std::size_t j = 0; j < spec.d; ++j) {
    if (!at_base[j].is_zero()) {
      fail(ErrorKind::precondition, "base point " + to_string(spec.base) + " is not on the manifold: rho" +
                                        std::to_string(j + 1) + " = " + at_base[j].to_string());
    }
  }
  AnalysisReport report;
  report.is_generic = static_cast<std::size_t>(rank(dz_matrix(spec, spec.base, xbar))) == spec.d;
  report.cr_codim = spec.d;
  report.cr_dim = spec.n - spec.d;
  return report;
}

LeviData levi_form(const ManifoldSpec& spec) {
  const Point x = spec.base;
  const Point xbar = conj(x);
  const Point at = concat(x, xbar);
  LeviData out;
  out.tc_basis = kernel_basis(dz_matrix(spec, x, xbar));
  if (static_cast<std::size_t>(out.tc_basis.cols()) != spec.n - spec.d) {
    fail(ErrorKind::precondition, "manifold is not generic at the base point");
  }
  const CMatrix vbar = out.tc_basis.unaryExpr([](const GaussianRational& c) { return conj(c); });
  const auto n = static_cast<Index>(spec.n);
  for (const auto& rho : spec.rho) {
    CMatrix mixed(n, n);
    for (std::size_t a = 0; a < spec.n; ++a) {
      const TruncatedSeries da = derive(rho, a);
      for (std::size_t b = 0; b < spec.n; ++b) {
        mixed(static_cast<Index>(a), static_cast<Index>(b)) = derive(da, spec.n + b).evaluate(at);
      }
    }
    out.forms.push_back(out.tc_basis.transpose() * mixed * vbar);
  }
  return out;
}

LeviTests levi_tests(const LeviData& levi) {
  const Index m = levi.tc_basis.cols();
  const auto d = static_cast<Index>(levi.forms.size());
  LeviTests out;
  if (m == 0) return out;
  CMatrix stacked(d * m, m);
  for (Index j = 0; j < d; ++j) stacked.middleRows(j * m, m) = levi.forms[static_cast<std::size_t>(j)];
  out.nondegenerate = rank(stacked) == m;

  CMatrix values(d, m * m);
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < m; ++k) {
      for (Index l = 0; l < m; ++l) values(j, k * m + l) = levi.forms[static_cast<std::size_t>(j)](k, l);
    }
  }
  out.surjective = rank(values) == d;
  return out;
}

JetRank segre_jet_rank(const ManifoldSpec& spec, int k) {
  const auto cx = complexify(spec);
  const Point xbar = conj(spec.base);
  const auto jq = jet_of_segre(cx, spec.base, xbar, k, 1);
  const CMatrix jac = jq.map.jacobian();
  const CMatrix along = kernel_basis(dchi_matrix(spec, spec.base, xbar));
  JetRank out;
  out.k = k;
  out.full_rank = static_cast<std::size_t>(rank(jac));
  out.restricted_rank = static_cast<std::size_t>(rank(CMatrix(jac * along)));
  return out;
}

std::optional<int> nondegeneracy_order(const ManifoldSpec& spec, int k_max) {
  if (k_max < 1) fail(ErrorKind::input, "k_max must be at least 1");
  for (int k = 1; k <= k_max; ++k) {
    if (segre_jet_rank(spec, k).restricted_rank == spec.n - spec.d) return k;
  }
  return std::nullopt;
}

std::optional<int> minimality_order(const ManifoldSpec& spec, int s_max, std::uint64_t seed) {
  if (s_max < 1) fail(ErrorKind::input, "s_max must be at least 1");
  const auto cx = complexify(spec);
  for (int s = 1; s <= s_max; ++s) {
    if (segre_set_rank(cx, spec.base, s, seed) == spec.n) return s;
  }
  return std::nullopt;
}

AdmissibilityDetail admissibility(const MapGerm& f, const ManifoldSpec& M, const ManifoldSpec& Mp, int order) {
  if (!(f.base() == M.base)) fail(ErrorKind::precondition, "map base differs from the manifold base point");
  if (f.source_dim() != M.n || f.target_dim() != Mp.n) fail(ErrorKind::input, "map dimensions do not match the manifolds");
  const Point fx = f.value();
  const Point fx_bar = conj(fx);
  for (const auto& v : evaluate_rho(Mp, fx, fx_bar)) {
    if (!v.is_zero()) fail(ErrorKind::precondition, "f(base) = " + to_string(fx) + " is not on the target manifold");
  }

  AdmissibilityDetail out;
  const auto cx = complexify(M);
  const Point xbar = conj(M.base);
  const int N = min_order(order, f.order());
  const auto graph = segre_graph(cx, M.base, xbar, N);
  const std::size_t p = graph.free.size();
  const std::size_t nv = p + M.n;
  Point pbase;
  for (std::size_t k : graph.free) pbase.push_back(M.base[k]);
  pbase.insert(pbase.end(), xbar.begin(), xbar.end());

  std::vector<TruncatedSeries> zc(M.n), chic;
  for (std::size_t k = 0; k < p; ++k) {
    zc[graph.free[k]] = TruncatedSeries::variable(nv, k, N) + TruncatedSeries::constant(nv, N, M.base[graph.free[k]]);
  }
  for (std::size_t k = 0; k < graph.solved.size(); ++k) zc[graph.solved[k]] = graph.phi.component(k);
  for (std::size_t b = 0; b < M.n; ++b) {
    chic.push_back(TruncatedSeries::variable(nv, p + b, N) + TruncatedSeries::constant(nv, N, xbar[b]));
  }
  const MapGerm fz = compose(f.truncated(N), MapGerm(pbase, zc));
  const MapGerm fchi = compose(conjugate(f.truncated(N)), MapGerm(pbase, chic));
  std::vector<TruncatedSeries> inner = fz.components();
  inner.insert(inner.end(), fchi.components().begin(), fchi.components().end());
  out.maps_into = true;
  for (const auto& r : Mp.rho) {
    if (!substitute(r, inner).truncated(N).is_zero()) {
      out.maps_into = false;
      break;
    }
  }

  const CMatrix image = f.jacobian() * levi_form(M).tc_basis;
  const CMatrix target_dz = dz_matrix(Mp, fx, fx_bar);
  const CMatrix residual = target_dz * image;
  bool inside = true;
  for (Index r = 0; r < residual.rows(); ++r) {
    for (Index c = 0; c < residual.cols(); ++c) inside = inside && residual(r, c).is_zero();
  }
  out.tangent_onto = inside && static_cast<std::size_t>(rank(image)) == Mp.n - Mp.d;
  return out;
}

bool check_admissible(const MapGerm& f, const ManifoldSpec& M, const ManifoldSpec& Mp, int order) {
  return admissibility(f, M, Mp, order).admissible();
}

bool contains_curve(const ManifoldSpec& spec, const std::vector<TruncatedSeries>& gamma) {
  if (gamma.size() != spec.n) fail(ErrorKind::input, "curve has the wrong number of components");
  const std::size_t m = gamma.empty() ? 0 : gamma.front().nvars();
  std::vector<std::size_t> first(m), second(m);
  for (std::size_t k = 0; k < m; ++k) {
    first[k] = k;
    second[k] = m + k;
  }
  std::vector<TruncatedSeries> inner;
  for (const auto& g : gamma) inner.push_back(embed(g, 2 * m, first));
  for (const auto& g : gamma) inner.push_back(embed(conjugate(g), 2 * m, second));
  for (const auto& r : spec.rho) {
    if (!substitute(r, inner).is_zero()) return false;
  }
  return true;
}

AnalysisReport analyze(const ManifoldSpec& spec, int k_max, int s_max, std::uint64_t seed) {
  AnalysisReport report = validate_spec(spec);
  report.k_max = k_max;
  report.s_max = s_max;
  if (!report.is_generic) return report;
  const auto tests = levi_tests(levi_form(spec));
  report.levi_nondegenerate = tests.nondegenerate;
  report.levi_surjective = tests.surjective;
  report.nondeg_order = nondegeneracy_order(spec, k_max);
  if (report.levi_nondegenerate != (report.nondeg_order == 1)) {
    throw std::logic_error("Levi nondegeneracy disagrees with 1-nondegeneracy");
  }
  report.minimal_s = minimality_order(spec, s_max, seed);
  if (report.nondeg_order) report.determinacy_order = 2 * *report.nondeg_order * (1 + static_cast<int>(spec.d));
  return report;
}

}  // namespace crjet
