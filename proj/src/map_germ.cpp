#include "crjet/map_germ.hpp"

#include "crjet/errors.hpp"

namespace crjet {

namespace {

std::vector<TruncatedSeries> apply(const CMatrix& m, const std::vector<TruncatedSeries>& v, std::size_t nvars, int order) {
  std::vector<TruncatedSeries> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Index r = 0; r < m.rows(); ++r) {
    TruncatedSeries acc(nvars, order);
    for (Index c = 0; c < m.cols(); ++c) {
      if (m(r, c).is_zero()) continue;
      acc += v[static_cast<std::size_t>(c)] * m(r, c);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<TruncatedSeries> displacement_parts(const MapGerm& g) {
  std::vector<TruncatedSeries> out;
  out.reserve(g.target_dim());
  for (const auto& c : g.components()) {
    out.push_back(c - TruncatedSeries::constant(c.nvars(), c.order(), c.constant_term()));
  }
  return out;
}

}  // namespace

std::string to_string(const Point& p) {
  std::string out = "(";
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) out += ", ";
    out += p[k].to_string();
  }
  return out + ")";
}

Point conj(const Point& p) {
  Point out;
  out.reserve(p.size());
  for (const auto& c : p) out.push_back(conj(c));
  return out;
}

MapGerm::MapGerm(Point base, std::vector<TruncatedSeries> components)
    : base_(std::move(base)), components_(std::move(components)) {
  for (const auto& c : components_) {
    if (c.nvars() != base_.size()) {
      fail(ErrorKind::input, "germ component has " + std::to_string(c.nvars()) + " variables, base has " +
                                 std::to_string(base_.size()));
    }
    order_ = min_order(order_, c.order());
  }
  for (auto& c : components_) c = c.truncated(order_);
}

MapGerm MapGerm::identity(Point base, int order) {
  const std::size_t n = base.size();
  std::vector<TruncatedSeries> comps;
  for (std::size_t k = 0; k < n; ++k) {
    comps.push_back(TruncatedSeries::variable(n, k, order) + TruncatedSeries::constant(n, order, base[k]));
  }
  return {std::move(base), std::move(comps)};
}

Point MapGerm::value() const {
  Point out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.constant_term());
  return out;
}

CMatrix MapGerm::jacobian() const {
  const auto n = static_cast<Index>(source_dim());
  CMatrix jac = CMatrix::Zero(static_cast<Index>(target_dim()), n);
  for (std::size_t r = 0; r < components_.size(); ++r) {
    for (Index c = 0; c < n; ++c) {
      jac(static_cast<Index>(r), c) = components_[r].coeff(Multidegree::unit(source_dim(), static_cast<std::size_t>(c)));
    }
  }
  return jac;
}

Point MapGerm::evaluate_displacement(std::span<const GaussianRational> displacement) const {
  Point out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.evaluate(displacement));
  return out;
}

Point MapGerm::evaluate_at(std::span<const GaussianRational> point) const {
  if (point.size() != base_.size()) fail(ErrorKind::input, "evaluation point has wrong dimension");
  Point disp(point.size());
  for (std::size_t k = 0; k < point.size(); ++k) disp[k] = point[k] - base_[k];
  return evaluate_displacement(disp);
}

MapGerm MapGerm::truncated(int order) const {
  std::vector<TruncatedSeries> comps;
  comps.reserve(components_.size());
  for (const auto& c : components_) comps.push_back(c.truncated(order));
  return {base_, std::move(comps)};
}

MapGerm MapGerm::select(std::span<const std::size_t> rows) const {
  std::vector<TruncatedSeries> comps;
  comps.reserve(rows.size());
  for (std::size_t r : rows) comps.push_back(components_.at(r));
  MapGerm out(base_, std::move(comps));
  if (rows.empty()) out.order_ = order_;
  return out;
}

bool operator==(const MapGerm& a, const MapGerm& b) {
  if (!(a.base_ == b.base_) || a.components_.size() != b.components_.size()) return false;
  for (std::size_t k = 0; k < a.components_.size(); ++k) {
    if (!(a.components_[k] == b.components_[k])) return false;
  }
  return true;
}

MapGerm compose(const MapGerm& outer, const MapGerm& inner) {
  if (inner.target_dim() != outer.source_dim()) {
    fail(ErrorKind::input, "composition dimension mismatch: inner has " + std::to_string(inner.target_dim()) +
                               " components, outer expects " + std::to_string(outer.source_dim()));
  }
  if (!(inner.value() == outer.base())) {
    fail(ErrorKind::precondition,
         "composition base mismatch: inner value " + to_string(inner.value()) + " vs outer base " + to_string(outer.base()));
  }
  const auto disp = displacement_parts(inner);
  std::vector<TruncatedSeries> comps;
  comps.reserve(outer.target_dim());
  if (outer.source_dim() == 0) {
    for (const auto& c : outer.components()) {
      comps.push_back(TruncatedSeries::constant(inner.source_dim(), min_order(c.order(), inner.order()), c.constant_term()));
    }
  } else {
    for (const auto& c : outer.components()) comps.push_back(substitute(c, disp));
  }
  return {inner.base(), std::move(comps)};
}

MapGerm comp_inverse(const MapGerm& g, std::optional<int> order) {
  const std::size_t n = g.source_dim();
  if (g.target_dim() != n) fail(ErrorKind::input, "compositional inverse needs a square germ");
  const int N = order.value_or(g.order());
  if (N == kExactOrder) fail(ErrorKind::precondition, "compositional inverse needs a finite order");
  if (N > g.order()) fail(ErrorKind::precondition, "requested inverse order exceeds the germ order");
  const auto a_inv = inverse(g.jacobian());
  if (!a_inv) fail(ErrorKind::rank, "compositional inverse: singular linear part");

  // g(base + x) = c + A x + nonlinear(x)
  std::vector<TruncatedSeries> nonlinear;
  for (const auto& comp : g.components()) {
    TruncatedSeries t = comp.truncated(N);
    TruncatedSeries nl(n, N);
    for (const auto& [md, c] : t.terms()) {
      if (md.total() >= 2) nl.add_term(md, c);
    }
    nonlinear.push_back(std::move(nl));
  }
  std::vector<TruncatedSeries> ys;
  for (std::size_t k = 0; k < n; ++k) ys.push_back(TruncatedSeries::variable(n, k, N));

  std::vector<TruncatedSeries> h = apply(*a_inv, ys, n, N);
  for (int deg = 2; deg <= N; ++deg) {
    std::vector<TruncatedSeries> h_deg;
    // The nonlinear part is at least quadratic, so its degree-deg part only
    // sees h through degree deg - 1.
    for (const auto& s : h) h_deg.push_back(as_order(s.truncated(deg - 1), deg));
    std::vector<TruncatedSeries> rhs;
    for (std::size_t k = 0; k < n; ++k) {
      rhs.push_back(ys[k].truncated(deg) - substitute(nonlinear[k].truncated(deg), h_deg).truncated(deg));
    }
    h = apply(*a_inv, rhs, n, deg);
  }

  std::vector<TruncatedSeries> comps;
  for (std::size_t k = 0; k < n; ++k) {
    comps.push_back(as_order(h[k], N) + TruncatedSeries::constant(n, N, g.base()[k]));
  }
  return {g.value(), std::move(comps)};
}

MapGerm implicit_solve(const MapGerm& F, std::size_t free_count, std::optional<int> order) {
  const std::size_t total = F.source_dim();
  const std::size_t q = F.target_dim();
  if (free_count + q != total) fail(ErrorKind::input, "implicit solve: variable split does not match the equation count");
  for (const auto& v : F.value()) {
    if (!v.is_zero()) fail(ErrorKind::precondition, "implicit solve: equations do not vanish at the base point");
  }
  const int N = order.value_or(F.order());
  if (N == kExactOrder) fail(ErrorKind::precondition, "implicit solve needs a finite order");
  if (N > F.order()) fail(ErrorKind::precondition, "requested solution order exceeds the equation order");
  const CMatrix jac = F.jacobian();
  const auto b_inv = inverse(CMatrix(jac.rightCols(static_cast<Index>(q))));
  if (!b_inv) fail(ErrorKind::rank, "implicit solve: singular block for the solved variables");

  const std::size_t p = free_count;
  std::vector<TruncatedSeries> h(q, TruncatedSeries(p, 0));
  for (int deg = 1; deg <= N; ++deg) {
    std::vector<TruncatedSeries> inner;
    for (std::size_t k = 0; k < p; ++k) inner.push_back(TruncatedSeries::variable(p, k, deg));
    for (const auto& s : h) inner.push_back(as_order(s, deg));
    std::vector<TruncatedSeries> residual;
    for (const auto& comp : F.components()) residual.push_back(substitute(comp.truncated(deg), inner));
    const auto step = apply(*b_inv, residual, p, deg);
    for (std::size_t k = 0; k < q; ++k) h[k] = as_order(h[k], deg) - step[k];
  }

  const Point& base = F.base();
  Point u0(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(p));
  std::vector<TruncatedSeries> comps;
  for (std::size_t k = 0; k < q; ++k) {
    comps.push_back(as_order(h[k], N) + TruncatedSeries::constant(p, N, base[p + k]));
  }
  return {std::move(u0), std::move(comps)};
}

MapGerm conjugate(const MapGerm& g) {
  std::vector<TruncatedSeries> comps;
  comps.reserve(g.target_dim());
  for (const auto& c : g.components()) comps.push_back(conjugate(c));
  return {conj(g.base()), std::move(comps)};
}

Recentered recenter(const MapGerm& g, const Point& new_base) {
  if (new_base.size() != g.source_dim()) fail(ErrorKind::input, "recenter point has wrong dimension");
  Point disp(new_base.size());
  std::vector<std::size_t> moved;
  for (std::size_t k = 0; k < new_base.size(); ++k) {
    disp[k] = new_base[k] - g.base()[k];
    if (!disp[k].is_zero()) moved.push_back(k);
  }
  std::vector<TruncatedSeries> comps;
  comps.reserve(g.target_dim());
  if (g.is_exact()) {
    for (const auto& c : g.components()) comps.push_back(shift(c, disp));
    return {MapGerm(new_base, std::move(comps)), kExactOrder, true};
  }
  unsigned moved_degree = 0;
  for (const auto& c : g.components()) moved_degree = std::max(moved_degree, partial_degree(c, moved));
  const int retained = g.order() - static_cast<int>(moved_degree);
  for (const auto& c : g.components()) {
    TruncatedSeries poly(c.nvars(), kExactOrder);
    for (const auto& [md, v] : c.terms()) poly.add_term(md, v);
    comps.push_back(shift(poly, disp).truncated(retained));
  }
  return {MapGerm(new_base, std::move(comps)), retained, moved.empty()};
}

}  // namespace crjet
