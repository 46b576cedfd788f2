#include "crjet/segre.hpp"

#include <algorithm>

#include "crjet/errors.hpp"

namespace crjet {

namespace {

Point concat(const Point& a, const Point& b) {
  Point out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& subset) {
  std::vector<bool> in(n, false);
  for (std::size_t k : subset) in[k] = true;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (!in[k]) out.push_back(k);
  }
  return out;
}

// Every term has degree <= 1 jointly in the listed variables.
bool affine_in(const std::vector<TruncatedSeries>& polys, const std::vector<std::size_t>& vars) {
  for (const auto& p : polys) {
    if (partial_degree(p, vars) > 1) return false;
  }
  return true;
}

std::vector<std::size_t> offset_by(const std::vector<std::size_t>& vars, std::size_t offset) {
  std::vector<std::size_t> out;
  out.reserve(vars.size());
  for (std::size_t v : vars) out.push_back(v + offset);
  return out;
}

long bound_for(int attempt) { return 3 + 2 * attempt; }

// Solves rho_c = 0 for the `solved` coordinates of the point in slot
// `conjugate_slot` (z-type when false), the other slot and the free
// coordinates being fixed. rho_c must be affine in the solved coordinates.
std::optional<Point> solve_link(const Complexification& cx, bool conjugate_slot, const Point& other, Point own,
                                const std::vector<std::size_t>& solved) {
  const std::size_t n = cx.spec.n;
  const std::size_t d = cx.spec.d;
  for (std::size_t k : solved) own[k] = 0;
  const Point at = conjugate_slot ? concat(other, own) : concat(own, other);
  const std::size_t offset = conjugate_slot ? n : 0;
  CMatrix b(static_cast<Index>(d), static_cast<Index>(solved.size()));
  CVector rhs(static_cast<Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    rhs(static_cast<Index>(j)) = -cx.rho_c[j].evaluate(at);
    for (std::size_t k = 0; k < solved.size(); ++k) {
      b(static_cast<Index>(j), static_cast<Index>(k)) = derive(cx.rho_c[j], offset + solved[k]).evaluate(at);
    }
  }
  if (static_cast<std::size_t>(rank(b)) != solved.size()) return std::nullopt;
  const auto x = solve(b, rhs);
  if (!x) return std::nullopt;
  for (std::size_t k = 0; k < solved.size(); ++k) own[solved[k]] = (*x)(static_cast<Index>(k));
  return own;
}

Point random_point(std::mt19937_64& rng, std::size_t n, const std::vector<std::size_t>& coords, long bound) {
  Point p(n, GaussianRational(0));
  for (std::size_t k : coords) p[k] = random_gaussian(rng, bound);
  return p;
}

// Samples p1..p_len after x; nullopt when some link is singular.
std::optional<std::vector<Point>> sample_links(const Complexification& cx, const Point& x, int len,
                                               const std::vector<std::size_t>& solved, std::mt19937_64& rng,
                                               long bound) {
  const std::size_t n = cx.spec.n;
  const auto free = complement(n, solved);
  std::vector<Point> pts{x};
  for (int i = 1; i <= len; ++i) {
    const bool conj_slot = ChainPoint::is_conjugate_slot(static_cast<std::size_t>(i));
    auto next = solve_link(cx, conj_slot, pts.back(), random_point(rng, n, free, bound), solved);
    if (!next) return std::nullopt;
    pts.push_back(std::move(*next));
  }
  return pts;
}

std::optional<ChainPoint> sample_attempt(const Complexification& cx, const Point& x, int s,
                                         const std::vector<std::size_t>& solved, std::uint64_t seed, int attempt) {
  auto rng = make_rng(seed, static_cast<std::uint64_t>(attempt));
  auto pts = sample_links(cx, x, s, solved, rng, bound_for(attempt));
  if (!pts) return std::nullopt;
  ChainPoint chain;
  chain.points = std::move(*pts);
  chain.solved = solved;
  chain.seed = seed;
  chain.attempt = attempt;
  return chain;
}

}  // namespace

Complexification complexify(const ManifoldSpec& spec) { return {spec, spec.rho}; }

bool on_complexification(const Complexification& cx, const Point& z, const Point& chi) {
  for (const auto& v : evaluate_rho(cx.spec, z, chi)) {
    if (!v.is_zero()) return false;
  }
  return true;
}

std::vector<std::size_t> graph_split(const Complexification& cx, const Point& z, const Point& chi) {
  const auto piv = pivot_columns(dz_matrix(cx.spec, z, chi));
  if (piv.size() < cx.spec.d) {
    fail(ErrorKind::rank, "no invertible " + std::to_string(cx.spec.d) + "x" + std::to_string(cx.spec.d) +
                              " minor of the holomorphic differential at " + to_string(z));
  }
  return {piv.begin(), piv.end()};
}

SegreGraph segre_graph(const Complexification& cx, const Point& z0, const Point& chi0, int order) {
  const std::size_t n = cx.spec.n;
  const std::size_t d = cx.spec.d;
  if (z0.size() != n || chi0.size() != n) fail(ErrorKind::input, "graph center has the wrong dimension");
  if (!on_complexification(cx, z0, chi0)) {
    fail(ErrorKind::precondition, "graph center " + to_string(z0) + ", " + to_string(chi0) +
                                      " is not on the complexification");
  }
  SegreGraph g;
  g.z0 = z0;
  g.chi0 = chi0;
  g.solved = graph_split(cx, z0, chi0);
  g.free = complement(n, g.solved);

  // Variables for the implicit solve: free z displacements, chi
  // displacements, solved z displacements.
  const std::size_t p = n - d;
  std::vector<std::size_t> target(2 * n);
  for (std::size_t k = 0; k < p; ++k) target[g.free[k]] = k;
  for (std::size_t b = 0; b < n; ++b) target[n + b] = p + b;
  for (std::size_t k = 0; k < d; ++k) target[g.solved[k]] = p + n + k;
  const Point center = concat(z0, chi0);
  std::vector<TruncatedSeries> eqs;
  for (const auto& r : cx.rho_c) eqs.push_back(embed(shift(r, center), 2 * n, target));

  Point base;
  for (std::size_t k : g.free) base.push_back(z0[k]);
  base.insert(base.end(), chi0.begin(), chi0.end());
  for (std::size_t k : g.solved) base.push_back(z0[k]);
  g.phi = implicit_solve(MapGerm(base, eqs), p + n, order);
  return g;
}

std::vector<TruncatedSeries> graph_residual(const Complexification& cx, const SegreGraph& g) {
  const std::size_t n = cx.spec.n;
  const std::size_t p = g.free.size();
  const std::size_t nv = p + n;
  const int N = g.phi.order();
  std::vector<TruncatedSeries> inner(2 * n);
  for (std::size_t k = 0; k < p; ++k) {
    inner[g.free[k]] = TruncatedSeries::variable(nv, k, N) + TruncatedSeries::constant(nv, N, g.z0[g.free[k]]);
  }
  for (std::size_t k = 0; k < g.solved.size(); ++k) inner[g.solved[k]] = g.phi.component(k);
  for (std::size_t b = 0; b < n; ++b) {
    inner[n + b] = TruncatedSeries::variable(nv, p + b, N) + TruncatedSeries::constant(nv, N, g.chi0[b]);
  }
  std::vector<TruncatedSeries> out;
  for (const auto& r : cx.rho_c) out.push_back(substitute(r, inner));
  return out;
}

JetOfSegreMap jet_of_segre(const Complexification& cx, const Point& z, const Point& chi, int r, int order) {
  if (r < 0 || order < 0) fail(ErrorKind::input, "jet orders must be non-negative");
  const auto g = segre_graph(cx, z, chi, r + order);
  const std::size_t p = g.free.size();
  std::vector<std::size_t> split(p);
  for (std::size_t k = 0; k < p; ++k) split[k] = k;
  JetOfSegreMap out;
  out.z = z;
  out.chi = chi;
  out.r = r;
  out.alphas = multi_indices(p, static_cast<unsigned>(r));
  std::vector<TruncatedSeries> comps;
  for (const auto& phi : g.phi.components()) {
    for (const auto& alpha : out.alphas) comps.push_back(coefficient_of(phi, split, alpha).truncated(order));
  }
  out.map = MapGerm(chi, std::move(comps));
  return out;
}

LeftInverse left_inverse_jetQ(const JetOfSegreMap& jq, int order) {
  const std::size_t n = jq.chi.size();
  if (jq.map.order() < 1) fail(ErrorKind::input, "left inverse needs a jet map of order at least 1");
  const auto rows = pivot_rows(jq.map.jacobian());
  if (rows.size() < n) {
    fail(ErrorKind::rank, "Segre jet map of order " + std::to_string(jq.r) + " at " + to_string(jq.z) +
                              " has rank " + std::to_string(rows.size()) + " < " + std::to_string(n) +
                              "; the manifold is not " + std::to_string(jq.r) + "-nondegenerate there");
  }
  LeftInverse out;
  out.rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n));
  const MapGerm square = jq.map.select(out.rows).truncated(order);
  out.germ = comp_inverse(square, order);
  if (!(compose(out.germ, square) == MapGerm::identity(jq.chi, order))) {
    fail(ErrorKind::rank, "left inverse of the Segre jet map failed its identity check");
  }
  return out;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

GaussianRational random_gaussian(std::mt19937_64& rng, long bound) {
  // Raw engine output keeps draws identical across standard libraries.
  const auto span = static_cast<std::uint64_t>(2 * bound + 1);
  auto part = [&] {
    const long num = static_cast<long>(rng() % span) - bound;
    const long den = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(bound));
    return Rational(num, den);
  };
  Rational re = part();
  Rational im = part();
  re.canonicalize();
  im.canonicalize();
  return {re, im};
}

bool chain_valid(const Complexification& cx, const ChainPoint& chain) {
  for (std::size_t i = 1; i < chain.points.size(); ++i) {
    const bool conj_slot = ChainPoint::is_conjugate_slot(i);
    const Point& z = conj_slot ? chain.points[i - 1] : chain.points[i];
    const Point& chi = conj_slot ? chain.points[i] : chain.points[i - 1];
    if (!on_complexification(cx, z, chi)) return false;
  }
  return true;
}

std::vector<std::size_t> chain_split(const Complexification& cx) {
  const std::size_t n = cx.spec.n;
  const std::size_t d = cx.spec.d;
  const CMatrix dz = dz_matrix(cx.spec, cx.spec.base, conj(cx.spec.base));
  std::vector<std::size_t> pick;
  std::optional<std::vector<std::size_t>> found;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (found) return;
    if (pick.size() == d) {
      CMatrix minor(static_cast<Index>(d), static_cast<Index>(d));
      for (std::size_t k = 0; k < d; ++k) minor.col(static_cast<Index>(k)) = dz.col(static_cast<Index>(pick[k]));
      if (static_cast<std::size_t>(rank(minor)) == d && affine_in(cx.rho_c, pick) &&
          affine_in(cx.rho_c, offset_by(pick, n))) {
        found = pick;
      }
      return;
    }
    for (std::size_t k = start; k < n; ++k) {
      pick.push_back(k);
      self(self, k + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  if (!found) {
    fail(ErrorKind::unsupported,
         "no coordinate split with an invertible minor in which the defining equations are affine; "
         "exact chain sampling needs one");
  }
  return *found;
}

ChainPoint chain_sample(const Complexification& cx, const Point& x, int s, std::uint64_t seed, int retries) {
  if (s < 1) fail(ErrorKind::input, "chain length must be at least 1");
  const auto solved = chain_split(cx);
  for (int attempt = 0; attempt < retries; ++attempt) {
    if (auto chain = sample_attempt(cx, x, s, solved, seed, attempt)) return *chain;
  }
  fail(ErrorKind::retry_exhausted, "no nonsingular chain of length " + std::to_string(s) + " after " +
                                       std::to_string(retries) + " attempts");
}

std::optional<ChainPoint> chain_to(const Complexification& cx, const Point& x, const Point& target, int steps,
                                   std::uint64_t seed, int attempt) {
  if (steps < 2 || steps % 2 != 0) fail(ErrorKind::input, "a chain to a z-point needs an even length >= 2");
  const std::size_t n = cx.spec.n;
  const std::size_t d = cx.spec.d;
  std::vector<std::size_t> all_chi(n);
  for (std::size_t k = 0; k < n; ++k) all_chi[k] = n + k;
  if (!affine_in(cx.rho_c, all_chi)) {
    fail(ErrorKind::unsupported, "joining a chain to a prescribed point needs equations affine in the conjugate variables");
  }
  const auto solved = chain_split(cx);
  auto rng = make_rng(seed, static_cast<std::uint64_t>(attempt));
  const long bound = bound_for(attempt);
  auto pts = sample_links(cx, x, steps - 2, solved, rng, bound);
  if (!pts) return std::nullopt;

  // rho(a, chi) = rho(a, 0) + D_chi(a) chi for a in {p_{steps-2}, target}.
  const Point zero(n, GaussianRational(0));
  CMatrix a(static_cast<Index>(2 * d), static_cast<Index>(n));
  CVector rhs(static_cast<Index>(2 * d));
  const Point* anchors[2] = {&pts->back(), &target};
  for (std::size_t h = 0; h < 2; ++h) {
    const Point value = evaluate_rho(cx.spec, *anchors[h], zero);
    const CMatrix dchi = dchi_matrix(cx.spec, *anchors[h], zero);
    for (std::size_t j = 0; j < d; ++j) {
      const auto row = static_cast<Index>(h * d + j);
      rhs(row) = -value[j];
      a.row(row) = dchi.row(static_cast<Index>(j));
    }
  }
  auto chi = solve(a, rhs);
  if (!chi) return std::nullopt;
  const CMatrix kernel = kernel_basis(a);
  for (Index c = 0; c < kernel.cols(); ++c) *chi += kernel.col(c) * random_gaussian(rng, bound);
  pts->emplace_back(chi->begin(), chi->end());
  pts->push_back(target);

  ChainPoint chain;
  chain.points = std::move(*pts);
  chain.solved = solved;
  chain.seed = seed;
  chain.attempt = attempt;
  return chain;
}

std::size_t chain_rank(const Complexification& cx, const ChainPoint& chain) {
  const std::size_t n = cx.spec.n;
  const auto free = complement(n, chain.solved);
  const std::size_t p = free.size();
  const std::size_t s = chain.length();
  const auto params = static_cast<Index>(s * p);
  CMatrix prev = CMatrix::Zero(static_cast<Index>(n), params);
  for (std::size_t i = 1; i <= s; ++i) {
    const bool conj_slot = ChainPoint::is_conjugate_slot(i);
    const Point& z = conj_slot ? chain.points[i - 1] : chain.points[i];
    const Point& chi = conj_slot ? chain.points[i] : chain.points[i - 1];
    const CMatrix dz = dz_matrix(cx.spec, z, chi);
    const CMatrix dchi = dchi_matrix(cx.spec, z, chi);
    const CMatrix& own = conj_slot ? dchi : dz;
    const CMatrix& other = conj_slot ? dz : dchi;

    CMatrix cur = CMatrix::Zero(static_cast<Index>(n), params);
    for (std::size_t k = 0; k < p; ++k) {
      cur(static_cast<Index>(free[k]), static_cast<Index>((i - 1) * p + k)) = 1;
    }
    CMatrix own_free(own.rows(), static_cast<Index>(p));
    for (std::size_t k = 0; k < p; ++k) own_free.col(static_cast<Index>(k)) = own.col(static_cast<Index>(free[k]));
    CMatrix own_solved(own.rows(), static_cast<Index>(chain.solved.size()));
    for (std::size_t k = 0; k < chain.solved.size(); ++k) {
      own_solved.col(static_cast<Index>(k)) = own.col(static_cast<Index>(chain.solved[k]));
    }
    const auto inv = inverse(own_solved);
    if (!inv) fail(ErrorKind::rank, "chain link " + std::to_string(i) + " has a singular solved block");
    CMatrix cur_free(static_cast<Index>(p), params);
    for (std::size_t k = 0; k < p; ++k) cur_free.row(static_cast<Index>(k)) = cur.row(static_cast<Index>(free[k]));
    const CMatrix solved_rows = -(*inv) * (own_free * cur_free + other * prev);
    for (std::size_t k = 0; k < chain.solved.size(); ++k) {
      cur.row(static_cast<Index>(chain.solved[k])) = solved_rows.row(static_cast<Index>(k));
    }
    prev = std::move(cur);
  }
  return static_cast<std::size_t>(rank(prev));
}

std::size_t segre_set_rank(const Complexification& cx, const Point& x, int s, std::uint64_t seed, int retries) {
  if (s < 1) fail(ErrorKind::input, "chain length must be at least 1");
  const auto solved = chain_split(cx);
  std::size_t best = 0;
  for (int attempt = 0; attempt < retries && best < cx.spec.n; ++attempt) {
    if (auto chain = sample_attempt(cx, x, s, solved, seed, attempt)) best = std::max(best, chain_rank(cx, *chain));
  }
  return best;
}

}  // namespace crjet
