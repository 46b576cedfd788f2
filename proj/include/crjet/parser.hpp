#ifndef CRJET_PARSER_HPP
#define CRJET_PARSER_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crjet/errors.hpp"
#include "crjet/geometry.hpp"
#include "crjet/map_germ.hpp"

namespace crjet {

/// Input error carrying the source position of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string token, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

/// Expression tree over declared variables and their conjugates.
struct Expr {
  enum class Kind { constant, variable, add, sub, mul, div, neg, pow };
  Kind kind = Kind::constant;
  GaussianRational value;
  std::size_t var = 0;
  bool conjugated = false;
  unsigned exponent = 0;
  std::shared_ptr<const Expr> lhs;
  std::shared_ptr<const Expr> rhs;
};
using ExprPtr = std::shared_ptr<const Expr>;

/// A parsed map file: holomorphic components over the declared variables.
///
/// Components may divide by non-constant polynomials; such maps are exact
/// closed forms whose germs are expanded as series on request.
struct MapSource {
  std::vector<std::string> vars;
  Point base;
  std::vector<ExprPtr> components;
  /// Set by an `order N` line: the components are a truncation of an
  /// unknown germ at this order rather than a closed form.
  std::optional<int> declared_order;
  bool rational = false;

  std::size_t source_dim() const { return vars.size(); }
  std::size_t target_dim() const { return components.size(); }
  /// Whether the components describe the map exactly (no declared truncation).
  bool closed_form() const { return !declared_order.has_value(); }
  /// The germ at `base`. Polynomial closed forms give exact germs unless
  /// `order` is set; rational ones need an order. A declared order caps it.
  MapGerm germ(std::optional<int> order = std::nullopt) const;
  /// Exact value at a point (closed forms only).
  Point evaluate(const Point& point) const;
};

ManifoldSpec parse_manifold(std::string_view text);
MapSource parse_map(std::string_view text);
/// A point `(a, b, ...)` of constant expressions, e.g. `(1/3, 1/5+2*i)`.
Point parse_point(std::string_view text);

/// Canonical manifold file text; parse_manifold reproduces an equal spec.
std::string serialize_manifold(const ManifoldSpec& spec);

/// Polynomial text over the given names; variables at index >= names.size()
/// are printed as conjugates `~name`.
std::string format_polynomial(const TruncatedSeries& p, const std::vector<std::string>& names);

}  // namespace crjet

#endif  // CRJET_PARSER_HPP
