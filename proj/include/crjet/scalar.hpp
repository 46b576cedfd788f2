#ifndef CRJET_SCALAR_HPP
#define CRJET_SCALAR_HPP

#include <gmpxx.h>

#include <concepts>
#include <ostream>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace crjet {

using Rational = mpq_class;

/// Complex number with arbitrary-precision rational real and imaginary parts.
///
/// Every operation is exact. Text form is `p/q+r/s*i`, with the zero parts
/// omitted (`3/2`, `-i`, `1/2-2*i`).
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(Rational re, Rational im = 0);
  template <std::integral I>
  GaussianRational(I value) : re_(static_cast<long>(value)), im_(0) {}

  static GaussianRational i() { return {0, 1}; }
  static GaussianRational fraction(long num, long den, long inum = 0, long iden = 1);

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  /// re^2 + im^2
  Rational norm() const { return re_ * re_ + im_ * im_; }

  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  /// Throws std::domain_error on division by zero.
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  GaussianRational operator-() const { return {-re_, -im_}; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  std::string to_string() const;
  /// Parses the canonical text form produced by `to_string`, and the
  /// looser forms `p/q`, `r/s*i`, `i`, `-i`, `p/q-r/s*i`.
  static GaussianRational parse(std::string_view text);

 private:
  Rational re_{0};
  Rational im_{0};
};

inline GaussianRational conj(const GaussianRational& a) { return {a.real(), -a.imag()}; }

std::ostream& operator<<(std::ostream& os, const GaussianRational& a);

/// Exact zero test used by the templated linear algebra.
inline bool is_zero(const GaussianRational& a) { return a.is_zero(); }

}  // namespace crjet

namespace Eigen {

template <>
struct NumTraits<crjet::GaussianRational> : GenericNumTraits<crjet::GaussianRational> {
  using Real = crjet::GaussianRational;
  using NonInteger = crjet::GaussianRational;
  using Nested = crjet::GaussianRational;
  using Literal = crjet::GaussianRational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 40,
    MulCost = 120
  };
  static Real epsilon() { return 0; }
  static Real dummy_precision() { return 0; }
  static int digits10() { return 0; }
};

}  // namespace Eigen

#endif  // CRJET_SCALAR_HPP
