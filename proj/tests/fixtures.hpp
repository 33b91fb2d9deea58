#pragma once

// Shared helpers for the test binaries: fixture loading, random generators
// and small independent oracles.

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "sdefi/sdefi.hpp"

namespace testing_support {

using namespace sdefi;

inline std::string system_path(const std::string& name) { return std::string(SDEFI_SYSTEMS_DIR) + "/" + name + ".json"; }

inline SystemFile load(const std::string& name) { return parse_system(system_path(name)); }

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"gbm",
                                              "linear_noise_martingale",
                                              "two_body",
                                              "two_body_small_noise",
                                              "cyclic3_unbalanced",
                                              "cyclic3",
                                              "lotka_volterra",
                                              "lotka_volterra3",
                                              "harmonic",
                                              "diagonal_saddle"};
  return names;
}

inline LaurentPoly P(const std::string& text, const std::vector<std::string>& names) { return parse_poly(text, names); }

inline std::vector<std::string> xs(std::size_t n) { return default_var_names(n); }

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }

  mpq_class rational(int num = 9, int den = 5) {
    mpq_class q(uniform(-num, num), uniform(1, den));
    q.canonicalize();
    return q;
  }
  CRational complex_rational(bool allow_imag = true) {
    return {rational(), allow_imag && uniform(0, 2) == 0 ? rational() : mpq_class(0)};
  }
  /// Random Laurent polynomial with exponents in [emin, emax] per variable.
  LaurentPoly poly(std::size_t n, int emin, int emax, int max_terms, bool allow_imag = true) {
    LaurentPoly p(n);
    const int terms = uniform(1, max_terms);
    for (int t = 0; t < terms; ++t) {
      ExpVec e(n);
      for (auto& v : e) v = uniform(emin, emax);
      p += LaurentPoly::monomial(e, complex_rational(allow_imag));
    }
    return p;
  }
  VField field(std::size_t n, int emin, int emax, int max_terms) {
    VField v = VField::zero(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = poly(n, emin, emax, max_terms);
    return v;
  }
  QMatrix matrix(std::size_t r, std::size_t c, int num = 5, bool allow_imag = false) {
    QMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform(0, 3) == 0 ? CRational(0) : CRational(rational(num, 3), allow_imag && uniform(0, 1) ? rational(num, 3) : mpq_class(0));
    return m;
  }
  std::vector<std::complex<double>> point(std::size_t n, double lo = 0.5, double hi = 1.5) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {real(lo, hi) * (uniform(0, 1) ? 1.0 : -1.0), 0.0};
    return x;
  }
};

/// Exact determinant by cofactor expansion; deliberately unrelated to the
/// library's elimination and characteristic-polynomial code.
inline CRational cofactor_det(const QMatrix& a) {
  const std::size_t n = a.rows();
  if (n == 0) return CRational(1);
  if (n == 1) return a(0, 0);
  CRational acc(0);
  for (std::size_t j = 0; j < n; ++j) {
    if (a(0, j).is_zero()) continue;
    QMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = a(r, c);
    const CRational term = a(0, j) * cofactor_det(minor);
    acc = j % 2 ? acc - term : acc + term;
  }
  return acc;
}

/// Plain rational Gauss-Jordan rank (division-based), an oracle for the
/// fraction-free elimination.
inline std::size_t gauss_jordan_rank(QMatrix a) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t piv = r;
    while (piv < a.rows() && a(piv, c).is_zero()) ++piv;
    if (piv == a.rows()) continue;
    a.swap_rows(piv, r);
    const CRational inv = CRational(1) / a(r, c);
    for (std::size_t j = c; j < a.cols(); ++j) a(r, j) = a(r, j) * inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      const CRational f = a(i, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) = a(i, j) - f * a(r, j);
    }
    ++r;
  }
  return r;
}

/// Central finite differences on a double evaluation: an independent
/// numerical oracle for the generator.
inline std::complex<double> fd_generator(const SdeSystem& sys, const LaurentPoly& phi,
                                         std::vector<std::complex<double>> x, double h = 1e-4) {
  const std::size_t n = sys.dim();
  auto F = [&](const std::vector<std::complex<double>>& y) { return evaluate(phi, y); };
  std::vector<std::complex<double>> grad(n);
  std::vector<std::vector<std::complex<double>>> hess(n, std::vector<std::complex<double>>(n));
  const auto f0 = F(x);
  for (std::size_t i = 0; i < n; ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (F(xp) - F(xm)) / (2 * h);
    hess[i][i] = (F(xp) - 2.0 * f0 + F(xm)) / (h * h);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto pp = x, pm = x, mp = x, mm = x;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      hess[i][j] = hess[j][i] = (F(pp) - F(pm) - F(mp) + F(mm)) / (4 * h * h);
    }
  }
  std::complex<double> out = 0.0;
  for (std::size_t i = 0; i < n; ++i) out += grad[i] * evaluate(sys.drift[i], x);
  for (const auto& g : sys.diffusions) {
    std::vector<std::complex<double>> gv(n);
    for (std::size_t i = 0; i < n; ++i) gv[i] = evaluate(g[i], x);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out += 0.5 * gv[i] * hess[i][j] * gv[j];
  }
  return out;
}

}  // namespace testing_support
