#ifndef CRJET_MAP_GERM_HPP
#define CRJET_MAP_GERM_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crjet/linalg.hpp"
#include "crjet/scalar.hpp"
#include "crjet/series.hpp"

namespace crjet {

using Point = std::vector<GaussianRational>;
using CMatrix = Matrix<GaussianRational>;
using CVector = Vector<GaussianRational>;

std::string to_string(const Point& p);
Point conj(const Point& p);

/// A holomorphic map germ, or its jet, at a base point.
///
/// Components are series in the displacement from `base`; the constant
/// terms are the value of the map at the base. All components share the
/// number of variables and the truncation order.
class MapGerm {
 public:
  MapGerm() = default;
  /// Components are truncated to their common minimum order.
  MapGerm(Point base, std::vector<TruncatedSeries> components);

  static MapGerm identity(Point base, int order);

  const Point& base() const { return base_; }
  std::size_t source_dim() const { return base_.size(); }
  std::size_t target_dim() const { return components_.size(); }
  int order() const { return order_; }
  bool is_exact() const { return order_ == kExactOrder; }
  const std::vector<TruncatedSeries>& components() const { return components_; }
  const TruncatedSeries& component(std::size_t k) const { return components_.at(k); }

  /// Constant term vector (the value at the base point).
  Point value() const;
  /// target_dim x source_dim matrix of first-order coefficients.
  CMatrix jacobian() const;
  /// Value at base + displacement, from the stored terms.
  Point evaluate_displacement(std::span<const GaussianRational> displacement) const;
  /// Value at an absolute point, from the stored terms.
  Point evaluate_at(std::span<const GaussianRational> point) const;

  MapGerm truncated(int order) const;
  /// Selected components, in the given order.
  MapGerm select(std::span<const std::size_t> rows) const;

  friend bool operator==(const MapGerm& a, const MapGerm& b);

 private:
  Point base_;
  std::vector<TruncatedSeries> components_;
  int order_ = kExactOrder;
};

/// outer ∘ inner. Requires inner's value to equal outer's base point.
MapGerm compose(const MapGerm& outer, const MapGerm& inner);

/// Compositional inverse of a square germ with invertible linear part,
/// computed degree by degree. The inverse is based at g's value.
/// `order` defaults to g's order and must be finite.
MapGerm comp_inverse(const MapGerm& g, std::optional<int> order = std::nullopt);

/// Solves F(u, v) = 0 for v = h(u). F has `free_count` leading variables u
/// and target_dim trailing variables v; F must vanish at its base and
/// ∂F/∂v must be invertible there. h is based at the u part of F's base and
/// takes the v part of the base as its value.
MapGerm implicit_solve(const MapGerm& F, std::size_t free_count, std::optional<int> order = std::nullopt);

/// Conjugates every coefficient and the base point.
MapGerm conjugate(const MapGerm& g);

struct Recentered {
  MapGerm germ;
  /// Orders up to this one are trustworthy; kExactOrder for polynomial input.
  int retained_order;
  bool exact;
};

/// Re-expands g at `new_base` (a Taylor shift). Exact for polynomial germs.
/// For truncated germs the result is lossy: the retained order assumes the
/// discarded tail has no higher degree in the shifted coordinates than the
/// stored terms, and the result is truncated to that order.
Recentered recenter(const MapGerm& g, const Point& new_base);

}  // namespace crjet

#endif  // CRJET_MAP_GERM_HPP
