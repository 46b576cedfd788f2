#include "crjet/scalar.hpp"

#include <stdexcept>

namespace crjet {

namespace {

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  Rational q;
  if (q.set_str(std::string(text), 10) != 0) {
    throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
  }
  q.canonicalize();
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return q;
}

}  // namespace

GaussianRational::GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussianRational GaussianRational::fraction(long num, long den, long inum, long iden) {
  Rational re(num, den);
  Rational im(inum, iden);
  return {re, im};
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  if (is_real() && o.is_real()) {
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero Gaussian rational");
  if (o.is_real()) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  const Rational n = o.norm();
  Rational re = (re_ * o.re_ + im_ * o.im_) / n;
  Rational im = (im_ * o.re_ - re_ * o.im_) / n;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::string GaussianRational::to_string() const {
  const bool has_re = sgn(re_) != 0;
  const bool has_im = sgn(im_) != 0;
  if (!has_im) return re_.get_str();
  std::string out;
  if (has_re) out = re_.get_str();
  Rational mag = abs(im_);
  const bool neg = sgn(im_) < 0;
  if (neg) {
    out += "-";
  } else if (has_re) {
    out += "+";
  }
  if (mag != 1) out += mag.get_str() + "*";
  out += "i";
  return out;
}

GaussianRational GaussianRational::parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != ' ' && c != '\t') s.push_back(c);
  }
  if (s.empty()) throw std::invalid_argument("empty Gaussian rational literal");
  if (s.back() != 'i') return {parse_rational(s), 0};

  // Imaginary part runs from the last sign that is not at position 0.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size() - 1; k > 0; --k) {
    if (s[k] == '+' || s[k] == '-') {
      split = k;
      break;
    }
  }
  std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
  std::string im_part = split == std::string::npos ? s : s.substr(split);
  im_part.pop_back();  // trailing 'i'
  if (!im_part.empty() && im_part.back() == '*') im_part.pop_back();
  Rational im;
  if (im_part.empty() || im_part == "+") {
    im = 1;
  } else if (im_part == "-") {
    im = -1;
  } else {
    if (im_part.front() == '+') im_part.erase(0, 1);
    im = parse_rational(im_part);
  }
  Rational re = re_part.empty() ? Rational(0) : parse_rational(re_part);
  return {re, im};
}

std::ostream& operator<<(std::ostream& os, const GaussianRational& a) { return os << a.to_string(); }

}  // namespace crjet
