#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "sdefi/error.hpp"
#include "sdefi/rational.hpp"

namespace sdefi {

/// Dense univariate polynomial over complex rationals, coefficients in
/// ascending powers. The zero polynomial has no coefficients.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<CRational> coeffs) : c_(std::move(coeffs)) { trim(); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<CRational>& coeffs() const { return c_; }
  CRational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : CRational(0); }
  const CRational& leading() const { return c_.back(); }

  CRational operator()(const CRational& x) const {
    CRational acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  std::complex<double> operator()(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->to_complex();
    return acc;
  }

  UPoly derivative() const {
    std::vector<CRational> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * CRational(static_cast<long>(k)));
    return UPoly(std::move(d));
  }

  UPoly monic() const {
    if (is_zero()) return *this;
    const CRational lc = leading();
    std::vector<CRational> m = c_;
    for (auto& v : m) v /= lc;
    return UPoly(std::move(m));
  }

  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<CRational> r(a.c_.size() + b.c_.size() - 1, CRational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(r));
  }
  friend UPoly operator*(const CRational& s, UPoly a) {
    for (auto& v : a.c_) v *= s;
    a.trim();
    return a;
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) {
    std::vector<CRational> r(std::max(a.c_.size(), b.c_.size()), CRational(0));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
    return UPoly(std::move(r));
  }
  friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

  /// Quotient and remainder of Euclidean division.
  friend std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<CRational> rem = a.c_;
    const int db = b.degree();
    std::vector<CRational> quo(std::max(0, a.degree() - db + 1), CRational(0));
    for (int k = a.degree(); k >= db; --k) {
      const CRational q = rem[k] / b.leading();
      if (q.is_zero()) continue;
      quo[k - db] = q;
      for (int j = 0; j <= db; ++j) rem[k - db + j] -= q * b.c_[j];
    }
    return {UPoly(std::move(quo)), UPoly(std::move(rem))};
  }

  /// Monic greatest common divisor.
  friend UPoly gcd(UPoly a, UPoly b) {
    while (!b.is_zero()) {
      UPoly r = divmod(a, b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<CRational> c_;
};

/// Yun's square-free factorization: p = lc * prod f_k^k with each f_k
/// monic, square-free and pairwise coprime. Returns (f_k, k), k ascending,
/// constant factors omitted.
inline std::vector<std::pair<UPoly, int>> squarefree_factorization(const UPoly& p) {
  std::vector<std::pair<UPoly, int>> out;
  if (p.degree() < 1) return out;
  const UPoly f = p.monic();
  const UPoly fp = f.derivative();
  UPoly a = gcd(f, fp);
  UPoly b = divmod(f, a).first;
  UPoly c = divmod(fp, a).first;
  UPoly d = c - b.derivative();
  int k = 1;
  while (b.degree() >= 1) {
    UPoly g = gcd(b, d);
    if (g.degree() >= 1) out.emplace_back(g, k);
    b = divmod(b, g).first;
    c = divmod(d, g).first;
    d = c - b.derivative();
    ++k;
  }
  return out;
}

inline bool is_squarefree(const UPoly& p) { return gcd(p, p.derivative()).degree() <= 0; }

struct DurandKernerOptions {
  double tol = 1e-12;
  int max_iter = 2000;
  int restarts = 8;
  std::uint64_t seed = 0x5DEECE66DULL;
};

/// Simultaneous (Weierstrass / Durand-Kerner) iteration on a polynomial with
/// complex coefficients, followed by Newton polishing. Throws NumericError
/// when no restart converges.
inline std::vector<std::complex<double>> durand_kerner(const UPoly& p, const DurandKernerOptions& opt = {}) {
  using cd = std::complex<double>;
  const int n = p.degree();
  if (n < 1) return {};
  std::vector<cd> a(n + 1);
  const UPoly m = p.monic();
  for (int k = 0; k <= n; ++k) a[k] = m.coeff(k).to_complex();
  if (n == 1) return {-a[0]};

  auto eval = [&](cd x) {
    cd acc = 0.0;
    for (int k = n; k >= 0; --k) acc = acc * x + a[k];
    return acc;
  };
  auto eval_d = [&](cd x) {
    cd acc = 0.0;
    for (int k = n; k >= 1; --k) acc = acc * x + static_cast<double>(k) * a[k];
    return acc;
  };

  double radius = 0.0;  // Cauchy bound
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(a[k]));
  radius = 1.0 + radius;

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
    const double phase = attempt == 0 ? 0.4 : 2.0 * std::numbers::pi * unif(rng);
    const double r0 = attempt == 0 ? 0.5 * radius : radius * (0.2 + 0.8 * unif(rng));
    std::vector<cd> z(n);
    for (int k = 0; k < n; ++k) z[k] = std::polar(r0, phase + 2.0 * std::numbers::pi * k / n);

    bool converged = false;
    for (int it = 0; it < opt.max_iter && !converged; ++it) {
      double max_step = 0.0;
      for (int i = 0; i < n; ++i) {
        cd denom = 1.0;
        for (int j = 0; j < n; ++j)
          if (j != i) denom *= (z[i] - z[j]);
        if (std::abs(denom) == 0.0) denom = cd(1e-300, 0.0);
        const cd step = eval(z[i]) / denom;
        z[i] -= step;
        max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[i])));
      }
      if (!std::isfinite(max_step)) break;
      converged = max_step <= opt.tol;
    }
    if (!converged) continue;
    for (auto& zi : z) {
      for (int polish = 0; polish < 3; ++polish) {
        const cd d = eval_d(zi);
        if (std::abs(d) == 0.0) break;
        const cd step = eval(zi) / d;
        if (!std::isfinite(std::abs(step))) break;
        zi -= step;
      }
    }
    return z;
  }
  throw NumericError("Durand-Kerner iteration did not converge for degree-" + std::to_string(n) +
                     " polynomial");
}

/// A root with multiplicity; `exact` is set when the root was certified to
/// be a Gaussian rational by exact evaluation.
struct Root {
  std::complex<double> value;
  std::optional<CRational> exact;
  int multiplicity = 1;
};

/// All roots of p (with multiplicity, from a square-free decomposition).
/// Each numeric root is snapped to a nearby Gaussian rational and kept exact
/// if the polynomial vanishes there exactly.
inline std::vector<Root> polynomial_roots(const UPoly& p, const DurandKernerOptions& opt = {}) {
  std::vector<Root> out;
  for (const auto& [factor, mult] : squarefree_factorization(p)) {
    for (const auto& z : durand_kerner(factor, opt)) {
      Root r{z, std::nullopt, mult};
      const CRational guess(rational_approximation(z.real(), 1'000'000),
                            rational_approximation(z.imag(), 1'000'000));
      if (factor(guess).is_zero()) {
        r.exact = guess;
        r.value = guess.to_complex();
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace sdefi
