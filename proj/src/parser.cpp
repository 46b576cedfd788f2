#include "crjet/parser.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace crjet {

ParseError::ParseError(std::size_t line, std::size_t column, std::string token, const std::string& message)
    : Error(ErrorKind::input,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message +
                (token.empty() ? std::string() : " (at '" + token + "')")),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

namespace {

struct Token {
  enum class Kind { ident, number, symbol, end };
  Kind kind = Kind::end;
  std::string text;
  std::size_t column = 0;
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t k = 0;
  while (k < line.size()) {
    const char c = line[k];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++k;
      continue;
    }
    const std::size_t start = k;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (k < line.size() && (std::isalnum(static_cast<unsigned char>(line[k])) || line[k] == '_')) ++k;
      out.push_back({Token::Kind::ident, std::string(line.substr(start, k - start)), start + 1});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
      out.push_back({Token::Kind::number, std::string(line.substr(start, k - start)), start + 1});
    } else if (std::string_view("+-*/^()~,:").find(c) != std::string_view::npos) {
      ++k;
      out.push_back({Token::Kind::symbol, std::string(1, c), start + 1});
    } else {
      throw ParseError(line_no, start + 1, std::string(1, c), "unexpected character");
    }
  }
  out.push_back({Token::Kind::end, "", line.size() + 1});
  return out;
}

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr binary(Expr::Kind kind, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = kind;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return make(std::move(e));
}

class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, std::size_t pos, std::size_t line_no, const std::vector<std::string>& vars,
             bool allow_conjugates)
      : toks_(toks), pos_(pos), line_(line_no), vars_(vars), allow_conj_(allow_conjugates) {}

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (is_symbol("+") || is_symbol("-")) {
      const bool plus = peek().text == "+";
      ++pos_;
      lhs = binary(plus ? Expr::Kind::add : Expr::Kind::sub, lhs, parse_term());
    }
    return lhs;
  }

  std::size_t pos() const { return pos_; }
  const Token& peek() const { return toks_[pos_]; }

  [[noreturn]] void error(const Token& t, const std::string& message) const {
    throw ParseError(line_, t.column, t.text, message);
  }

 private:
  bool is_symbol(const char* s) const { return peek().kind == Token::Kind::symbol && peek().text == s; }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    while (is_symbol("*") || is_symbol("/")) {
      const bool mul = peek().text == "*";
      ++pos_;
      lhs = binary(mul ? Expr::Kind::mul : Expr::Kind::div, lhs, parse_unary());
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (is_symbol("-")) {
      ++pos_;
      Expr e;
      e.kind = Expr::Kind::neg;
      e.lhs = parse_unary();
      return make(std::move(e));
    }
    if (is_symbol("+")) {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (is_symbol("^")) {
      ++pos_;
      const Token& t = peek();
      if (t.kind != Token::Kind::number) error(t, "exponent must be a non-negative integer");
      ++pos_;
      Expr e;
      e.kind = Expr::Kind::pow;
      e.lhs = base;
      try {
        e.exponent = static_cast<unsigned>(std::stoul(t.text));
      } catch (const std::exception&) {
        error(t, "exponent out of range");
      }
      return make(std::move(e));
    }
    return base;
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::number) {
      ++pos_;
      Expr e;
      e.value = GaussianRational(Rational(mpz_class(t.text)));
      return make(std::move(e));
    }
    if (t.kind == Token::Kind::ident) {
      ++pos_;
      if (t.text == "i") {
        Expr e;
        e.value = GaussianRational::i();
        return make(std::move(e));
      }
      return variable(t, false);
    }
    if (is_symbol("~")) {
      const Token& tilde = t;
      ++pos_;
      const Token& name = peek();
      if (name.kind != Token::Kind::ident || name.text == "i") error(name, "expected a variable after '~'");
      if (!allow_conj_) error(tilde, "conjugate variables are not allowed in a holomorphic map");
      ++pos_;
      return variable(name, true);
    }
    if (is_symbol("(")) {
      ++pos_;
      ExprPtr inner = parse_expr();
      if (!is_symbol(")")) error(peek(), "expected ')'");
      ++pos_;
      return inner;
    }
    error(t, t.kind == Token::Kind::end ? "unexpected end of expression" : "unexpected token");
  }

  ExprPtr variable(const Token& t, bool conjugated) {
    const auto it = std::find(vars_.begin(), vars_.end(), t.text);
    if (it == vars_.end()) error(t, "undeclared variable");
    Expr e;
    e.kind = Expr::Kind::variable;
    e.var = static_cast<std::size_t>(it - vars_.begin());
    e.conjugated = conjugated;
    return make(std::move(e));
  }

  const std::vector<Token>& toks_;
  std::size_t pos_;
  std::size_t line_;
  const std::vector<std::string>& vars_;
  bool allow_conj_;
};

using Leaf = std::function<TruncatedSeries(std::size_t var, bool conjugated)>;

// Reciprocal of a series with nonzero constant term, to the series order.
TruncatedSeries reciprocal(const TruncatedSeries& b) {
  const GaussianRational c = b.constant_term();
  if (c.is_zero()) fail(ErrorKind::precondition, "division by an expression that vanishes at the base point");
  const GaussianRational inv = GaussianRational(1) / c;
  if (b.degree() <= 0) return TruncatedSeries::constant(b.nvars(), b.order(), inv);
  if (b.is_exact()) fail(ErrorKind::input, "division by a non-constant expression needs a truncation order");
  const TruncatedSeries t = (b - TruncatedSeries::constant(b.nvars(), b.order(), c)) * (-inv);
  TruncatedSeries sum = TruncatedSeries::constant(b.nvars(), b.order(), 1);
  TruncatedSeries term = sum;
  for (int k = 1; k <= b.order(); ++k) {
    term = term * t;
    if (term.is_zero()) break;
    sum += term;
  }
  return sum * inv;
}

TruncatedSeries to_series(const Expr& e, std::size_t nvars, int order, const Leaf& leaf) {
  switch (e.kind) {
    case Expr::Kind::constant: return TruncatedSeries::constant(nvars, order, e.value);
    case Expr::Kind::variable: return leaf(e.var, e.conjugated);
    case Expr::Kind::add: return to_series(*e.lhs, nvars, order, leaf) + to_series(*e.rhs, nvars, order, leaf);
    case Expr::Kind::sub: return to_series(*e.lhs, nvars, order, leaf) - to_series(*e.rhs, nvars, order, leaf);
    case Expr::Kind::mul: return to_series(*e.lhs, nvars, order, leaf) * to_series(*e.rhs, nvars, order, leaf);
    case Expr::Kind::div:
      return to_series(*e.lhs, nvars, order, leaf) * reciprocal(to_series(*e.rhs, nvars, order, leaf));
    case Expr::Kind::neg: return -to_series(*e.lhs, nvars, order, leaf);
    case Expr::Kind::pow: return power(to_series(*e.lhs, nvars, order, leaf), e.exponent);
  }
  return {};
}

GaussianRational evaluate_expr(const Expr& e, const Point& at) {
  switch (e.kind) {
    case Expr::Kind::constant: return e.value;
    case Expr::Kind::variable: return e.conjugated ? conj(at.at(e.var)) : at.at(e.var);
    case Expr::Kind::add: return evaluate_expr(*e.lhs, at) + evaluate_expr(*e.rhs, at);
    case Expr::Kind::sub: return evaluate_expr(*e.lhs, at) - evaluate_expr(*e.rhs, at);
    case Expr::Kind::mul: return evaluate_expr(*e.lhs, at) * evaluate_expr(*e.rhs, at);
    case Expr::Kind::div: {
      const GaussianRational den = evaluate_expr(*e.rhs, at);
      if (den.is_zero()) fail(ErrorKind::precondition, "division by zero evaluating at " + to_string(at));
      return evaluate_expr(*e.lhs, at) / den;
    }
    case Expr::Kind::neg: return -evaluate_expr(*e.lhs, at);
    case Expr::Kind::pow: {
      GaussianRational out(1);
      const GaussianRational b = evaluate_expr(*e.lhs, at);
      for (unsigned k = 0; k < e.exponent; ++k) out *= b;
      return out;
    }
  }
  return {};
}

bool has_variable_divisor(const Expr& e) {
  auto has_var = [](const Expr& x, auto&& self) -> bool {
    if (x.kind == Expr::Kind::variable) return true;
    return (x.lhs && self(*x.lhs, self)) || (x.rhs && self(*x.rhs, self));
  };
  if (e.kind == Expr::Kind::div && has_var(*e.rhs, has_var)) return true;
  return (e.lhs && has_variable_divisor(*e.lhs)) || (e.rhs && has_variable_divisor(*e.rhs));
}

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ++line_no;
    auto toks = tokenize(text.substr(start, end - start), line_no);
    if (toks.size() > 1) out.push_back({line_no, std::move(toks)});
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

const std::set<std::string> kKeywords{"vars", "base", "order", "i"};

std::vector<std::string> parse_vars(const Line& line) {
  std::vector<std::string> vars;
  for (std::size_t k = 1; k + 1 < line.tokens.size(); ++k) {
    const Token& t = line.tokens[k];
    if (t.kind == Token::Kind::symbol && t.text == ",") continue;
    if (t.kind != Token::Kind::ident) throw ParseError(line.number, t.column, t.text, "expected a variable name");
    if (kKeywords.count(t.text)) throw ParseError(line.number, t.column, t.text, "reserved word used as a variable");
    if (std::find(vars.begin(), vars.end(), t.text) != vars.end()) {
      throw ParseError(line.number, t.column, t.text, "variable declared twice");
    }
    vars.push_back(t.text);
  }
  if (vars.empty()) throw ParseError(line.number, line.tokens[0].column, "vars", "no variables declared");
  return vars;
}

Point parse_point_tokens(const std::vector<Token>& toks, std::size_t pos, std::size_t line_no) {
  const std::vector<std::string> none;
  auto expect = [&](const char* s) {
    const Token& t = toks[pos];
    if (t.kind != Token::Kind::symbol || t.text != s) {
      throw ParseError(line_no, t.column, t.text, std::string("expected '") + s + "'");
    }
    ++pos;
  };
  expect("(");
  Point out;
  while (true) {
    ExprParser p(toks, pos, line_no, none, false);
    out.push_back(evaluate_expr(*p.parse_expr(), {}));
    pos = p.pos();
    if (toks[pos].kind == Token::Kind::symbol && toks[pos].text == ",") {
      ++pos;
      continue;
    }
    break;
  }
  expect(")");
  if (toks[pos].kind != Token::Kind::end) throw ParseError(line_no, toks[pos].column, toks[pos].text, "trailing input");
  return out;
}

// `<prefix><k>: expr` with k = expected index.
ExprPtr parse_component(const Line& line, const std::string& prefix, std::size_t expected,
                        const std::vector<std::string>& vars, bool allow_conj) {
  const Token& head = line.tokens[0];
  const std::string want = prefix + std::to_string(expected);
  if (head.text != want) {
    throw ParseError(line.number, head.column, head.text, "expected '" + want + ":' (components are numbered from 1)");
  }
  const Token& colon = line.tokens[1];
  if (colon.kind != Token::Kind::symbol || colon.text != ":") {
    throw ParseError(line.number, colon.column, colon.text, "expected ':'");
  }
  ExprParser p(line.tokens, 2, line.number, vars, allow_conj);
  ExprPtr e = p.parse_expr();
  if (p.peek().kind != Token::Kind::end) p.error(p.peek(), "unexpected token after expression");
  return e;
}

struct Header {
  std::vector<std::string> vars;
  std::optional<Point> base;
  std::optional<int> order;
  std::vector<const Line*> body;
};

Header read_header(const std::vector<Line>& lines, bool allow_order) {
  Header h;
  for (const auto& line : lines) {
    const Token& head = line.tokens[0];
    if (head.kind == Token::Kind::ident && head.text == "vars") {
      if (!h.vars.empty()) throw ParseError(line.number, head.column, head.text, "variables declared twice");
      h.vars = parse_vars(line);
    } else if (head.kind == Token::Kind::ident && head.text == "base") {
      if (h.vars.empty()) throw ParseError(line.number, head.column, head.text, "'base' before 'vars'");
      if (h.base) throw ParseError(line.number, head.column, head.text, "base declared twice");
      h.base = parse_point_tokens(line.tokens, 1, line.number);
      if (h.base->size() != h.vars.size()) {
        throw ParseError(line.number, head.column, head.text, "base point has the wrong dimension");
      }
    } else if (head.kind == Token::Kind::ident && head.text == "order") {
      if (!allow_order) throw ParseError(line.number, head.column, head.text, "'order' is only valid in map files");
      const Token& t = line.tokens[1];
      if (t.kind != Token::Kind::number || line.tokens[2].kind != Token::Kind::end) {
        throw ParseError(line.number, t.column, t.text, "expected a single non-negative integer");
      }
      h.order = std::stoi(t.text);
    } else {
      if (h.vars.empty()) throw ParseError(line.number, head.column, head.text, "expected 'vars' first");
      h.body.push_back(&line);
    }
  }
  if (h.vars.empty()) throw ParseError(1, 1, "", "missing 'vars' line");
  return h;
}

std::string rational_text(const Rational& q) { return q.get_str(); }

}  // namespace

ManifoldSpec parse_manifold(std::string_view text) {
  const auto lines = split_lines(text);
  const Header h = read_header(lines, false);
  const std::size_t n = h.vars.size();
  std::vector<TruncatedSeries> rho;
  const Leaf leaf = [n](std::size_t var, bool conjugated) {
    return TruncatedSeries::variable(2 * n, conjugated ? n + var : var, kExactOrder);
  };
  for (const Line* line : h.body) {
    const ExprPtr e = parse_component(*line, "rho", rho.size() + 1, h.vars, true);
    if (has_variable_divisor(*e)) {
      throw ParseError(line->number, line->tokens[0].column, line->tokens[0].text,
                       "defining functions must be polynomials (division by a variable expression)");
    }
    TruncatedSeries s = to_series(*e, 2 * n, kExactOrder, leaf);
    if (!reality_symmetric(s, n)) {
      throw ParseError(line->number, line->tokens[0].column, line->tokens[0].text,
                       "not real-valued: the coefficient of z^a ~z^b must be the conjugate of that of z^b ~z^a");
    }
    rho.push_back(std::move(s));
  }
  if (rho.empty()) throw ParseError(lines.empty() ? 1 : lines.back().number, 1, "", "no defining functions (rho1: ...)");
  ManifoldSpec spec = make_spec(h.base.value_or(Point(n, GaussianRational(0))), std::move(rho), h.vars);
  const auto report = validate_spec(spec);
  if (!report.is_generic) {
    fail(ErrorKind::precondition, "manifold is not generic at the base point " + to_string(spec.base) +
                                      ": the holomorphic differentials of the defining functions are dependent");
  }
  return spec;
}

MapSource parse_map(std::string_view text) {
  const auto lines = split_lines(text);
  const Header h = read_header(lines, true);
  MapSource out;
  out.vars = h.vars;
  out.base = h.base.value_or(Point(h.vars.size(), GaussianRational(0)));
  out.declared_order = h.order;
  for (const Line* line : h.body) {
    out.components.push_back(parse_component(*line, "f", out.components.size() + 1, h.vars, false));
    out.rational = out.rational || has_variable_divisor(*out.components.back());
  }
  if (out.components.empty()) throw ParseError(lines.empty() ? 1 : lines.back().number, 1, "", "no components (f1: ...)");
  if (out.rational && out.declared_order) {
    fail(ErrorKind::input, "a truncated map ('order') must be polynomial");
  }
  return out;
}

MapGerm MapSource::germ(std::optional<int> order) const {
  int N = order.value_or(kExactOrder);
  if (declared_order) N = min_order(N, *declared_order);
  if (rational && N == kExactOrder) fail(ErrorKind::input, "a rational map needs a truncation order for its germ");
  const std::size_t n = vars.size();
  const Leaf leaf = [&](std::size_t var, bool) {
    return TruncatedSeries::variable(n, var, N) + TruncatedSeries::constant(n, N, base[var]);
  };
  std::vector<TruncatedSeries> comps;
  for (const auto& e : components) comps.push_back(to_series(*e, n, N, leaf));
  return {base, std::move(comps)};
}

Point MapSource::evaluate(const Point& point) const {
  if (!closed_form()) fail(ErrorKind::precondition, "a truncated map has no exact values away from its base");
  if (point.size() != vars.size()) fail(ErrorKind::input, "evaluation point has the wrong dimension");
  Point out;
  for (const auto& e : components) out.push_back(evaluate_expr(*e, point));
  return out;
}

Point parse_point(std::string_view text) { return parse_point_tokens(tokenize(text, 1), 0, 1); }

std::string format_polynomial(const TruncatedSeries& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  const std::size_t n = names.size();
  std::ostringstream os;
  bool first = true;
  for (const auto& [md, c] : p.terms()) {
    std::string mono;
    for (std::size_t k = 0; k < md.size(); ++k) {
      if (md[k] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += k >= n ? "~" + names[k - n] : names[k];
      if (md[k] > 1) mono += "^" + std::to_string(md[k]);
    }
    bool negative = false;
    std::string mag;
    if (c.is_real() || sgn(c.real()) == 0) {
      const bool imag = !c.is_real();
      const Rational v = imag ? c.imag() : c.real();
      negative = sgn(v) < 0;
      const Rational a = abs(v);
      if (imag) {
        mag = a == 1 ? "i" : rational_text(a) + "*i";
      } else {
        mag = rational_text(a);
      }
    } else {
      mag = "(" + c.to_string() + ")";
    }
    std::string term;
    if (mono.empty()) {
      term = mag;
    } else {
      term = mag == "1" ? mono : mag + "*" + mono;
    }
    if (first) {
      os << (negative ? "-" : "") << term;
    } else {
      os << (negative ? " - " : " + ") << term;
    }
    first = false;
  }
  return os.str();
}

std::string serialize_manifold(const ManifoldSpec& spec) {
  std::ostringstream os;
  os << "vars";
  for (const auto& v : spec.names) os << ' ' << v;
  os << "\nbase (";
  for (std::size_t k = 0; k < spec.base.size(); ++k) os << (k ? ", " : "") << spec.base[k].to_string();
  os << ")\n";
  for (std::size_t j = 0; j < spec.rho.size(); ++j) {
    os << "rho" << j + 1 << ": " << format_polynomial(spec.rho[j], spec.names) << '\n';
  }
  return os.str();
}

}  // namespace crjet
