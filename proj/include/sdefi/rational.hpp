#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <regex>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "sdefi/error.hpp"

namespace sdefi {

/// Parses an exact rational literal `p` or `p/q`. Decimal and exponent
/// notation are rejected so that no float silently enters exact arithmetic.
inline mpq_class parse_rational(std::string_view text) {
  static const std::regex pattern(R"(^\s*([+-]?\d+)(\s*/\s*(\d+))?\s*$)");
  std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, pattern)) {
    throw InputError("not an exact rational literal: '" + s +
                     "' (write fractions as p/q, e.g. \"1/2\")");
  }
  mpz_class num(m[1].str().front() == '+' ? m[1].str().substr(1) : m[1].str());
  mpz_class den = m[3].matched ? mpz_class(m[3].str()) : mpz_class(1);
  if (den == 0) throw InputError("zero denominator in rational literal: '" + s + "'");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

/// Exact conversion of a finite double to a rational (every double is one).
inline mpq_class rational_from_double(double v) {
  if (!std::isfinite(v)) throw NumericError("cannot convert non-finite value to a rational");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), v);
  return q;
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions). Used to propose exact candidates for numeric roots.
inline mpq_class rational_approximation(double v, std::int64_t max_den) {
  if (!std::isfinite(v)) return mpq_class(0);
  const bool negative = v < 0;
  double x = std::fabs(v);
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(x);
    if (a > 9.0e15) break;
    mpz_class ai(static_cast<long>(a));
    mpz_class p2 = ai * p1 + p0;
    mpz_class q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  if (q1 == 0) return mpq_class(0);
  mpq_class r(p1, q1);
  r.canonicalize();
  return negative ? mpq_class(-r) : r;
}

inline std::string rational_to_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Exact complex rational re + i*im.
class CRational {
 public:
  CRational() = default;
  CRational(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  CRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {  // NOLINT
    re_.canonicalize();
    im_.canonicalize();
  }

  static CRational parse(std::string_view re, std::string_view im = "0") {
    return {parse_rational(re), parse_rational(im)};
  }
  static CRational from_complex(std::complex<double> z) {
    return {rational_from_double(z.real()), rational_from_double(z.imag())};
  }
  static CRational imaginary_unit() { return {mpq_class(0), mpq_class(1)}; }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  CRational conj() const { return {re_, -im_}; }
  mpq_class norm2() const { return re_ * re_ + im_ * im_; }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  CRational& operator+=(const CRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  CRational& operator-=(const CRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  CRational& operator*=(const CRational& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  CRational& operator/=(const CRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    const mpq_class d = o.norm2();
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / d;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  friend CRational operator+(CRational a, const CRational& b) { return a += b; }
  friend CRational operator-(CRational a, const CRational& b) { return a -= b; }
  friend CRational operator*(CRational a, const CRational& b) { return a *= b; }
  friend CRational operator/(CRational a, const CRational& b) { return a /= b; }
  friend CRational operator-(const CRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const CRational& a, const CRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const CRational& a, const CRational& b) { return !(a == b); }

  /// `3/2`, `-1/2i`, `(3/2+1/2i)`.
  std::string to_string() const {
    if (is_real()) return rational_to_string(re_);
    const std::string imag = imag_string();
    if (sgn(re_) == 0) return imag;
    const std::string sign = sgn(im_) < 0 ? "-" : "+";
    return "(" + rational_to_string(re_) + sign + imag_string(true) + ")";
  }

  friend std::ostream& operator<<(std::ostream& os, const CRational& c) {
    return os << c.to_string();
  }

 private:
  std::string imag_string(bool unsigned_form = false) const {
    mpq_class mag = unsigned_form ? mpq_class(abs(im_)) : im_;
    if (mag == 1) return "i";
    if (mag == -1) return "-i";
    return rational_to_string(mag) + "i";
  }

  mpq_class re_{0};
  mpq_class im_{0};
};

}  // namespace sdefi
