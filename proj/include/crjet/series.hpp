#ifndef CRJET_SERIES_HPP
#define CRJET_SERIES_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crjet/scalar.hpp"

namespace crjet {

/// Exponent vector of a monomial, one entry per variable.
class Multidegree {
 public:
  Multidegree() = default;
  explicit Multidegree(std::size_t nvars) : exps_(nvars, 0) {}
  Multidegree(std::initializer_list<unsigned> exps) : exps_(exps) { recount(); }
  explicit Multidegree(std::vector<unsigned> exps) : exps_(std::move(exps)) { recount(); }

  static Multidegree unit(std::size_t nvars, std::size_t var) {
    Multidegree m(nvars);
    m.exps_[var] = 1;
    m.total_ = 1;
    return m;
  }

  std::size_t size() const { return exps_.size(); }
  unsigned operator[](std::size_t k) const { return exps_[k]; }
  unsigned total() const { return total_; }
  const std::vector<unsigned>& exponents() const { return exps_; }

  void set(std::size_t k, unsigned e) {
    total_ = total_ - exps_[k] + e;
    exps_[k] = e;
  }

  friend Multidegree operator+(const Multidegree& a, const Multidegree& b);
  friend bool operator==(const Multidegree& a, const Multidegree& b) { return a.exps_ == b.exps_; }

 private:
  void recount() {
    total_ = 0;
    for (unsigned e : exps_) total_ += e;
  }
  std::vector<unsigned> exps_;
  unsigned total_ = 0;
};

/// Graded-lexicographic order: lower total degree first; within a degree,
/// the larger exponent of the earliest variable first (z1^2, z1 z2, z2^2).
struct GradedLex {
  bool operator()(const Multidegree& a, const Multidegree& b) const {
    if (a.total() != b.total()) return a.total() < b.total();
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] != b[k]) return a[k] > b[k];
    }
    return false;
  }
};

/// Truncation order marking an exact polynomial (nothing was discarded).
inline constexpr int kExactOrder = std::numeric_limits<int>::max();

inline int min_order(int a, int b) { return a < b ? a : b; }

/// Sparse multivariate power series over the Gaussian rationals, truncated at
/// a total degree `order`. Terms above the order are discarded; zero
/// coefficients are never stored. `order == kExactOrder` means the series is
/// an exact polynomial.
class TruncatedSeries {
 public:
  using Terms = std::map<Multidegree, GaussianRational, GradedLex>;

  TruncatedSeries() = default;
  TruncatedSeries(std::size_t nvars, int order) : nvars_(nvars), order_(order) {}

  static TruncatedSeries constant(std::size_t nvars, int order, const GaussianRational& c);
  static TruncatedSeries variable(std::size_t nvars, std::size_t var, int order);
  static TruncatedSeries monomial(const Multidegree& md, const GaussianRational& c, int order);

  std::size_t nvars() const { return nvars_; }
  int order() const { return order_; }
  bool is_exact() const { return order_ == kExactOrder; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  GaussianRational coeff(const Multidegree& md) const;
  GaussianRational constant_term() const;
  /// Highest total degree among stored terms (-1 for the zero series).
  int degree() const;

  /// Adds `c` to the coefficient of `md`; ignored above the order.
  void add_term(const Multidegree& md, const GaussianRational& c);

  TruncatedSeries truncated(int order) const;
  /// Homogeneous component of total degree `deg`.
  TruncatedSeries homogeneous(unsigned deg) const;

  TruncatedSeries& operator+=(const TruncatedSeries& o);
  TruncatedSeries& operator-=(const TruncatedSeries& o);
  TruncatedSeries& operator*=(const GaussianRational& c);

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator*(TruncatedSeries a, const GaussianRational& c) { return a *= c; }
  friend TruncatedSeries operator*(const GaussianRational& c, TruncatedSeries a) { return a *= c; }
  TruncatedSeries operator-() const;

  /// Coefficient-wise equality after truncating both to the smaller order.
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b);

  /// Exact value at a point (the stored polynomial is evaluated).
  GaussianRational evaluate(std::span<const GaussianRational> point) const;

  /// Canonical text: a header line `series <nvars> <order|exact>` followed by
  /// one `coeff * monomial` line per term in graded-lex order.
  std::string to_text() const;
  static TruncatedSeries from_text(std::string_view text);

 private:
  void check_vars(const TruncatedSeries& o) const;

  std::size_t nvars_ = 0;
  int order_ = kExactOrder;
  Terms terms_;
};

/// Copies the stored terms of degree <= order into a series of the given
/// order. Used when the caller knows the terms above the old order vanish.
TruncatedSeries as_order(const TruncatedSeries& s, int order);

/// Formal partial derivative; the order drops by one.
TruncatedSeries derive(const TruncatedSeries& s, std::size_t var);

TruncatedSeries conjugate(const TruncatedSeries& s);

/// Power s^e truncated at the series order.
TruncatedSeries power(const TruncatedSeries& s, unsigned e);

/// Substitutes `inner[k]` for variable k of `outer`.
///
/// When `outer` is truncated, every inner series must have zero constant term
/// (so no truncated tail can feed lower degrees). The result order is the
/// minimum of the outer order and the inner orders.
TruncatedSeries substitute(const TruncatedSeries& outer, std::span<const TruncatedSeries> inner);

/// Taylor shift of an exact polynomial: s(point + t) as a polynomial in t.
TruncatedSeries shift(const TruncatedSeries& s, std::span<const GaussianRational> point);

/// Renames variables: variable k of `s` becomes variable `target[k]` of a
/// series in `nvars` variables.
TruncatedSeries embed(const TruncatedSeries& s, std::size_t nvars, std::span<const std::size_t> target);

/// Sets the listed variables to zero and drops them, keeping the others in
/// their original relative order.
TruncatedSeries restrict_to(const TruncatedSeries& s, std::span<const std::size_t> kept);

/// For the variables `split` and a multi-index `alpha` over them, returns
/// the coefficient of prod split[k]^alpha[k] as a series in the remaining
/// variables (original relative order). The result order is
/// order - |alpha|.
TruncatedSeries coefficient_of(const TruncatedSeries& s, std::span<const std::size_t> split,
                               const Multidegree& alpha);

/// Maximum exponent sum over the variables `vars` among stored terms.
unsigned partial_degree(const TruncatedSeries& s, std::span<const std::size_t> vars);

/// All multi-indices in `nvars` variables with total degree <= max_total,
/// in graded-lex order.
std::vector<Multidegree> multi_indices(std::size_t nvars, unsigned max_total);

/// Name of variable k in text forms: z1, z2, ...
std::string variable_name(std::size_t k);

}  // namespace crjet

#endif  // CRJET_SERIES_HPP
