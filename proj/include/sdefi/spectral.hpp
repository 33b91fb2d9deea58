#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdefi/ito.hpp"
#include "sdefi/linalg.hpp"
#include "sdefi/upoly.hpp"

namespace sdefi {

/// det(x I - A) by the Faddeev-LeVerrier recurrence, exact.
inline UPoly characteristic_polynomial(const QMatrix& a) {
  if (!a.square()) throw DimensionError("characteristic polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  std::vector<CRational> c(n + 1, CRational(0));
  c[n] = CRational(1);
  QMatrix m(n, n);
  const QMatrix id = QMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m + c[n - k + 1] * id;
    c[n - k] = -trace(a * m) / CRational(static_cast<long>(k));
  }
  return UPoly(std::move(c));
}

/// det(A - x I) = (-1)^n det(x I - A).
inline UPoly characteristic_polynomial_signed(const QMatrix& a) {
  const UPoly p = characteristic_polynomial(a);
  return a.rows() % 2 ? CRational(-1) * p : p;
}

inline CRational determinant(const QMatrix& a) {
  const CRational c0 = characteristic_polynomial(a).coeff(0);
  return a.rows() % 2 ? -c0 : c0;
}

/// p(A) by Horner's scheme.
inline QMatrix evaluate_at_matrix(const UPoly& p, const QMatrix& a) {
  const std::size_t n = a.rows();
  QMatrix acc(n, n);
  const QMatrix id = QMatrix::identity(n);
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) acc = a * acc + *it * id;
  return acc;
}

struct Eigenvalue {
  std::complex<double> value;
  std::optional<CRational> exact;
};

struct Spectrum {
  UPoly char_poly;  // monic det(xI - A)
  std::vector<Eigenvalue> values;

  std::vector<std::complex<double>> numeric() const {
    std::vector<std::complex<double>> v;
    for (const auto& e : values) v.push_back(e.value);
    return v;
  }
  bool all_exact() const {
    for (const auto& e : values)
      if (!e.exact) return false;
    return true;
  }
};

/// Roots of the exact characteristic polynomial, repeated by multiplicity.
/// Rational (Gaussian rational) eigenvalues are certified exactly.
inline Spectrum eigenvalues(const QMatrix& a, const DurandKernerOptions& opt = {}) {
  Spectrum s;
  s.char_poly = characteristic_polynomial(a);
  for (const auto& r : polynomial_roots(s.char_poly, opt))
    for (int k = 0; k < r.multiplicity; ++k) s.values.push_back({r.value, r.exact});
  return s;
}

/// Exact linear part at the origin of a polynomial vector field. The field
/// must be polynomial (no negative exponents).
inline QMatrix linear_part(const VField& v) {
  const std::size_t n = v.dim();
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i].has_negative_exponents())
      throw PreconditionError("component " + std::to_string(i + 1) +
                              " has negative exponents; the field is not analytic at the origin");
    for (std::size_t j = 0; j < n; ++j) {
      ExpVec e(n, 0);
      e[j] = 1;
      m(i, j) = v[i].coeff(e);
    }
  }
  return m;
}

inline CRational constant_term(const LaurentPoly& p) { return p.coeff(ExpVec(p.dim(), 0)); }

inline bool vanishes_at_origin(const VField& v) {
  for (const auto& c : v.comps)
    if (c.has_negative_exponents() || !constant_term(c).is_zero()) return false;
  return true;
}

/// No constant and no linear terms, i.e. v = O(|x|^2).
inline bool is_higher_order(const VField& v) {
  for (const auto& c : v.comps)
    for (const auto& [e, coeff] : c.terms())
      if (total_degree(e) < 2 || std::any_of(e.begin(), e.end(), [](int k) { return k < 0; })) return false;
  return true;
}

struct SpectralData {
  QMatrix drift_jacobian;                    // Df(0)
  std::vector<QMatrix> diffusion_jacobians;  // Dg_i(0)
  QMatrix corrected;                         // Df(0) - 1/2 sum Dg_i(0)^2
  Spectrum drift_spectrum;                   // mu^0
  std::vector<Spectrum> diffusion_spectra;   // mu^i
  Spectrum corrected_spectrum;               // lambda
  std::vector<bool> diffusion_vanishes;      // g_i(0) == 0
  std::vector<bool> diffusion_higher_order;  // g_i = O(|x|^2)
};

inline SpectralData linearization(const SdeSystem& sys, const DurandKernerOptions& opt = {}) {
  if (!vanishes_at_origin(sys.drift))
    throw PreconditionError("drift does not vanish at the origin (f(0) != 0); no singularity to analyse");
  SpectralData d;
  d.drift_jacobian = linear_part(sys.drift);
  d.corrected = d.drift_jacobian;
  for (const auto& g : sys.diffusions) {
    d.diffusion_vanishes.push_back(vanishes_at_origin(g));
    d.diffusion_higher_order.push_back(is_higher_order(g));
    QMatrix jg = linear_part(g);
    d.corrected = d.corrected - CRational(mpq_class(1, 2)) * (jg * jg);
    d.diffusion_jacobians.push_back(std::move(jg));
  }
  d.drift_spectrum = eigenvalues(d.drift_jacobian, opt);
  for (const auto& jg : d.diffusion_jacobians) d.diffusion_spectra.push_back(eigenvalues(jg, opt));
  d.corrected_spectrum = eigenvalues(d.corrected, opt);
  return d;
}

enum class H1Verdict { holds, fails, unknown };

inline const char* to_string(H1Verdict v) {
  switch (v) {
    case H1Verdict::holds: return "holds";
    case H1Verdict::fails: return "fails";
    default: return "unknown";
  }
}

struct H1Status {
  H1Verdict verdict = H1Verdict::unknown;
  std::string reason;
  /// Indices into {Df(0), Dg_1(0), ...} of a non-commuting pair.
  std::optional<std::pair<std::size_t, std::size_t>> noncommuting_pair;
  std::optional<QMatrix> commutator_witness;
  /// Index of a matrix that is not diagonalizable.
  std::optional<std::size_t> defective_matrix;
};

/// A matrix is diagonalizable iff its minimal polynomial is square-free,
/// i.e. iff the square-free part of its characteristic polynomial
/// annihilates it. Decided exactly.
inline bool is_diagonalizable(const QMatrix& a) {
  const UPoly p = characteristic_polynomial(a);
  UPoly radical(std::vector<CRational>{CRational(1)});
  for (const auto& [factor, mult] : squarefree_factorization(p)) radical = radical * factor;
  return is_zero(evaluate_at_matrix(radical, a));
}

/// Commuting and individually diagonalizable matrices are simultaneously
/// diagonalizable.
inline H1Status h1_check(const SpectralData& d) {
  std::vector<const QMatrix*> mats{&d.drift_jacobian};
  for (const auto& m : d.diffusion_jacobians) mats.push_back(&m);
  H1Status st;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    for (std::size_t j = i + 1; j < mats.size(); ++j) {
      QMatrix c = commutator(*mats[i], *mats[j]);
      if (!is_zero(c)) {
        st.verdict = H1Verdict::fails;
        st.reason = "linear parts do not commute";
        st.noncommuting_pair = std::make_pair(i, j);
        st.commutator_witness = std::move(c);
        return st;
      }
    }
  }
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (!is_diagonalizable(*mats[i])) {
      st.verdict = H1Verdict::fails;
      st.reason = "linear part is not diagonalizable";
      st.defective_matrix = i;
      return st;
    }
  }
  st.verdict = H1Verdict::holds;
  st.reason = "linear parts commute pairwise and are each diagonalizable";
  return st;
}

inline Eigen::MatrixXcd to_eigen(const QMatrix& a) {
  Eigen::MatrixXcd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j).to_complex();
  return m;
}

/// Eigenvalues of commuting diagonalizable matrices paired along a common
/// eigenbasis: result[i][j] is the eigenvalue of mats[i] on the j-th common
/// eigenvector. Common eigenvectors come from a generic linear combination;
/// numeric values are replaced by certified exact eigenvalues when they match.
inline std::vector<std::vector<Eigenvalue>> joint_spectrum(const std::vector<QMatrix>& mats,
                                                           const std::vector<Spectrum>& spectra) {
  if (mats.empty()) return {};
  const std::size_t n = mats.front().rows();
  std::mt19937_64 rng(0x9E3779B97F4A7C15ULL);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Eigen::MatrixXcd combo = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& m : mats) combo += unif(rng) * to_eigen(m);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(combo);
  if (solver.info() != Eigen::Success) throw NumericError("eigen-decomposition of joint combination failed");
  const Eigen::MatrixXcd vecs = solver.eigenvectors();

  std::vector<std::vector<Eigenvalue>> out(mats.size(), std::vector<Eigenvalue>(n));
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const Eigen::MatrixXcd mi = to_eigen(mats[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::VectorXcd v = vecs.col(static_cast<Eigen::Index>(j));
      const Eigen::VectorXcd w = mi * v;
      const std::complex<double> value = v.dot(w) / v.squaredNorm();  // Rayleigh quotient
      Eigenvalue ev{value, std::nullopt};
      double best = 1e-7 * (1.0 + std::abs(value));
      for (const auto& cand : spectra.at(i).values) {
        if (cand.exact && std::abs(cand.value - value) < best) {
          best = std::abs(cand.value - value);
          ev = cand;
        }
      }
      out[i][j] = ev;
    }
  }
  return out;
}

}  // namespace sdefi
