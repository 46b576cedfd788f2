#include "crjet/series.hpp"

#include <algorithm>
#include <sstream>

#include "crjet/errors.hpp"

namespace crjet {

Multidegree operator+(const Multidegree& a, const Multidegree& b) {
  Multidegree out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out.exps_[k] = a.exps_[k] + b.exps_[k];
  out.total_ = a.total_ + b.total_;
  return out;
}

std::string variable_name(std::size_t k) { return "z" + std::to_string(k + 1); }

TruncatedSeries TruncatedSeries::constant(std::size_t nvars, int order, const GaussianRational& c) {
  TruncatedSeries s(nvars, order);
  s.add_term(Multidegree(nvars), c);
  return s;
}

TruncatedSeries TruncatedSeries::variable(std::size_t nvars, std::size_t var, int order) {
  TruncatedSeries s(nvars, order);
  s.add_term(Multidegree::unit(nvars, var), 1);
  return s;
}

TruncatedSeries TruncatedSeries::monomial(const Multidegree& md, const GaussianRational& c, int order) {
  TruncatedSeries s(md.size(), order);
  s.add_term(md, c);
  return s;
}

GaussianRational TruncatedSeries::coeff(const Multidegree& md) const {
  auto it = terms_.find(md);
  return it == terms_.end() ? GaussianRational(0) : it->second;
}

GaussianRational TruncatedSeries::constant_term() const { return coeff(Multidegree(nvars_)); }

int TruncatedSeries::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(terms_.rbegin()->first.total());
}

void TruncatedSeries::add_term(const Multidegree& md, const GaussianRational& c) {
  if (md.size() != nvars_) fail(ErrorKind::input, "multidegree has wrong number of variables");
  if (c.is_zero()) return;
  if (order_ != kExactOrder && static_cast<int>(md.total()) > order_) return;
  auto [it, inserted] = terms_.try_emplace(md, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TruncatedSeries TruncatedSeries::truncated(int order) const {
  if (order >= order_) return *this;
  TruncatedSeries out(nvars_, order);
  for (const auto& [md, c] : terms_) {
    if (static_cast<int>(md.total()) > order) break;
    out.terms_.emplace_hint(out.terms_.end(), md, c);
  }
  return out;
}

TruncatedSeries TruncatedSeries::homogeneous(unsigned deg) const {
  TruncatedSeries out(nvars_, order_);
  for (const auto& [md, c] : terms_) {
    if (md.total() == deg) out.terms_.emplace_hint(out.terms_.end(), md, c);
  }
  return out;
}

void TruncatedSeries::check_vars(const TruncatedSeries& o) const {
  if (o.nvars_ != nvars_) {
    fail(ErrorKind::input, "variable-count mismatch: " + std::to_string(nvars_) + " vs " + std::to_string(o.nvars_));
  }
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& o) {
  check_vars(o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (const auto& [md, c] : o.terms_) add_term(md, c);
  return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& o) {
  check_vars(o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (const auto& [md, c] : o.terms_) add_term(md, -c);
  return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(const GaussianRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [md, v] : terms_) v *= c;
  return *this;
}

TruncatedSeries TruncatedSeries::operator-() const {
  TruncatedSeries out = *this;
  for (auto& [md, v] : out.terms_) v = -v;
  return out;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  a.check_vars(b);
  const int order = min_order(a.order_, b.order_);
  TruncatedSeries out(a.nvars_, order);
  const bool bounded = order != kExactOrder;
  for (const auto& [ma, ca] : a.terms_) {
    if (bounded && static_cast<int>(ma.total()) > order) break;
    for (const auto& [mb, cb] : b.terms_) {
      if (bounded && static_cast<int>(ma.total() + mb.total()) > order) break;
      out.add_term(ma + mb, ca * cb);
    }
  }
  return out;
}

bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.nvars_ != b.nvars_) return false;
  const int order = min_order(a.order_, b.order_);
  const TruncatedSeries ta = a.truncated(order);
  const TruncatedSeries tb = b.truncated(order);
  return ta.terms_ == tb.terms_;
}

GaussianRational TruncatedSeries::evaluate(std::span<const GaussianRational> point) const {
  if (point.size() != nvars_) fail(ErrorKind::input, "evaluation point has wrong dimension");
  std::vector<std::vector<GaussianRational>> powers(nvars_, std::vector<GaussianRational>{GaussianRational(1)});
  GaussianRational sum(0);
  for (const auto& [md, c] : terms_) {
    GaussianRational term = c;
    for (std::size_t k = 0; k < nvars_; ++k) {
      const unsigned e = md[k];
      if (e == 0) continue;
      auto& pk = powers[k];
      while (pk.size() <= e) pk.push_back(pk.back() * point[k]);
      term *= pk[e];
    }
    sum += term;
  }
  return sum;
}

std::string TruncatedSeries::to_text() const {
  std::ostringstream os;
  os << "series " << nvars_ << ' ' << (is_exact() ? std::string("exact") : std::to_string(order_)) << '\n';
  for (const auto& [md, c] : terms_) {
    os << c.to_string() << " * ";
    bool first = true;
    for (std::size_t k = 0; k < nvars_; ++k) {
      if (md[k] == 0) continue;
      if (!first) os << '*';
      os << variable_name(k);
      if (md[k] > 1) os << '^' << md[k];
      first = false;
    }
    if (first) os << '1';
    os << '\n';
  }
  return os.str();
}

TruncatedSeries TruncatedSeries::from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line)) fail(ErrorKind::input, "empty series text");
  std::istringstream header(line);
  std::string tag, order_text;
  std::size_t nvars = 0;
  if (!(header >> tag >> nvars >> order_text) || tag != "series") {
    fail(ErrorKind::input, "malformed series header '" + line + "'");
  }
  const int order = order_text == "exact" ? kExactOrder : std::stoi(order_text);
  TruncatedSeries out(nvars, order);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto sep = line.find(" * ");
    if (sep == std::string::npos) fail(ErrorKind::input, "malformed series term '" + line + "'");
    const GaussianRational c = GaussianRational::parse(line.substr(0, sep));
    Multidegree md(nvars);
    std::string mono = line.substr(sep + 3);
    if (mono != "1") {
      std::istringstream ms(mono);
      std::string factor;
      while (std::getline(ms, factor, '*')) {
        const auto caret = factor.find('^');
        const std::string name = factor.substr(0, caret);
        if (name.size() < 2 || name[0] != 'z') fail(ErrorKind::input, "bad variable '" + name + "'");
        const std::size_t var = std::stoul(name.substr(1)) - 1;
        if (var >= nvars) fail(ErrorKind::input, "variable index out of range in '" + line + "'");
        const unsigned e = caret == std::string::npos ? 1u : static_cast<unsigned>(std::stoul(factor.substr(caret + 1)));
        md.set(var, md[var] + e);
      }
    }
    out.add_term(md, c);
  }
  return out;
}

TruncatedSeries as_order(const TruncatedSeries& s, int order) {
  TruncatedSeries out(s.nvars(), order);
  for (const auto& [md, c] : s.terms()) out.add_term(md, c);
  return out;
}

TruncatedSeries derive(const TruncatedSeries& s, std::size_t var) {
  if (var >= s.nvars()) fail(ErrorKind::input, "derivative variable out of range");
  const int order = s.is_exact() ? kExactOrder : s.order() - 1;
  TruncatedSeries out(s.nvars(), order);
  for (const auto& [md, c] : s.terms()) {
    const unsigned e = md[var];
    if (e == 0) continue;
    Multidegree lowered = md;
    lowered.set(var, e - 1);
    out.add_term(lowered, c * GaussianRational(static_cast<long>(e)));
  }
  return out;
}

TruncatedSeries conjugate(const TruncatedSeries& s) {
  TruncatedSeries out(s.nvars(), s.order());
  for (const auto& [md, c] : s.terms()) out.add_term(md, conj(c));
  return out;
}

TruncatedSeries power(const TruncatedSeries& s, unsigned e) {
  TruncatedSeries result = TruncatedSeries::constant(s.nvars(), s.order(), 1);
  TruncatedSeries base = s;
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

TruncatedSeries substitute(const TruncatedSeries& outer, std::span<const TruncatedSeries> inner) {
  if (inner.size() != outer.nvars()) fail(ErrorKind::input, "substitution needs one series per outer variable");
  if (inner.empty()) return outer;
  const std::size_t nvars = inner.front().nvars();
  int order = outer.order();
  for (const auto& s : inner) {
    if (s.nvars() != nvars) fail(ErrorKind::input, "variable-count mismatch among substituted series");
    order = min_order(order, s.order());
    if (!outer.is_exact() && !s.constant_term().is_zero()) {
      fail(ErrorKind::precondition, "substitution into a truncated series needs zero constant terms");
    }
  }

  std::vector<std::vector<TruncatedSeries>> powers(outer.nvars());
  auto power_of = [&](std::size_t k, unsigned e) -> const TruncatedSeries& {
    auto& pk = powers[k];
    if (pk.empty()) pk.push_back(TruncatedSeries::constant(nvars, order, 1));
    while (pk.size() <= e) pk.push_back(pk.back() * inner[k].truncated(order));
    return pk[e];
  };

  TruncatedSeries out(nvars, order);
  for (const auto& [md, c] : outer.terms()) {
    TruncatedSeries term = TruncatedSeries::constant(nvars, order, c);
    for (std::size_t k = 0; k < outer.nvars() && !term.is_zero(); ++k) {
      if (md[k] == 0) continue;
      term = term * power_of(k, md[k]);
    }
    out += term;
  }
  return out;
}

TruncatedSeries shift(const TruncatedSeries& s, std::span<const GaussianRational> point) {
  if (point.size() != s.nvars()) fail(ErrorKind::input, "shift point has wrong dimension");
  if (!s.is_exact()) fail(ErrorKind::precondition, "exact Taylor shift needs a polynomial");
  std::vector<TruncatedSeries> inner;
  inner.reserve(s.nvars());
  for (std::size_t k = 0; k < s.nvars(); ++k) {
    inner.push_back(TruncatedSeries::variable(s.nvars(), k, kExactOrder) +
                    TruncatedSeries::constant(s.nvars(), kExactOrder, point[k]));
  }
  return substitute(s, inner);
}

TruncatedSeries embed(const TruncatedSeries& s, std::size_t nvars, std::span<const std::size_t> target) {
  if (target.size() != s.nvars()) fail(ErrorKind::input, "embedding needs one target per variable");
  TruncatedSeries out(nvars, s.order());
  for (const auto& [md, c] : s.terms()) {
    Multidegree m(nvars);
    for (std::size_t k = 0; k < s.nvars(); ++k) {
      if (md[k] != 0) m.set(target[k], m[target[k]] + md[k]);
    }
    out.add_term(m, c);
  }
  return out;
}

TruncatedSeries restrict_to(const TruncatedSeries& s, std::span<const std::size_t> kept) {
  std::vector<bool> keep(s.nvars(), false);
  for (std::size_t k : kept) keep.at(k) = true;
  TruncatedSeries out(kept.size(), s.order());
  for (const auto& [md, c] : s.terms()) {
    bool drop = false;
    for (std::size_t k = 0; k < s.nvars(); ++k) {
      if (!keep[k] && md[k] != 0) {
        drop = true;
        break;
      }
    }
    if (drop) continue;
    Multidegree m(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) m.set(j, md[kept[j]]);
    out.add_term(m, c);
  }
  return out;
}

TruncatedSeries coefficient_of(const TruncatedSeries& s, std::span<const std::size_t> split, const Multidegree& alpha) {
  if (alpha.size() != split.size()) fail(ErrorKind::input, "multi-index does not match the split");
  std::vector<bool> in_split(s.nvars(), false);
  for (std::size_t k : split) in_split.at(k) = true;
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < s.nvars(); ++k) {
    if (!in_split[k]) rest.push_back(k);
  }
  const int order = s.is_exact() ? kExactOrder : s.order() - static_cast<int>(alpha.total());
  TruncatedSeries out(rest.size(), order);
  for (const auto& [md, c] : s.terms()) {
    bool match = true;
    for (std::size_t j = 0; j < split.size(); ++j) {
      if (md[split[j]] != alpha[j]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    Multidegree m(rest.size());
    for (std::size_t j = 0; j < rest.size(); ++j) m.set(j, md[rest[j]]);
    out.add_term(m, c);
  }
  return out;
}

unsigned partial_degree(const TruncatedSeries& s, std::span<const std::size_t> vars) {
  unsigned best = 0;
  for (const auto& [md, c] : s.terms()) {
    unsigned d = 0;
    for (std::size_t k : vars) d += md[k];
    best = std::max(best, d);
  }
  return best;
}

std::vector<Multidegree> multi_indices(std::size_t nvars, unsigned max_total) {
  std::vector<Multidegree> out;
  // Enumerate by degree; within a degree, graded-lex order is produced by
  // giving the earliest variable the largest exponent first.
  for (unsigned deg = 0; deg <= max_total; ++deg) {
    std::vector<unsigned> exps(nvars, 0);
    auto rec = [&](auto&& self, std::size_t k, unsigned remaining) -> void {
      if (nvars == 0) {
        if (remaining == 0) out.emplace_back(exps);
        return;
      }
      if (k + 1 == nvars) {
        exps[k] = remaining;
        out.emplace_back(exps);
        return;
      }
      for (unsigned e = remaining + 1; e-- > 0;) {
        exps[k] = e;
        self(self, k + 1, remaining - e);
      }
    };
    rec(rec, 0, deg);
  }
  return out;
}

}  // namespace crjet
