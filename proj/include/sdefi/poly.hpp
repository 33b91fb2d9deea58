#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdefi/error.hpp"
#include "sdefi/rational.hpp"

namespace sdefi {

/// Exponent vector of a Laurent monomial; entries may be negative.
using ExpVec = std::vector<int>;

inline int total_degree(const ExpVec& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Graded lexicographic order: total degree first, then lexicographic
/// with x1 most significant.
struct GradedLex {
  bool operator()(const ExpVec& a, const ExpVec& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

/// Sparse multivariate Laurent polynomial with exact complex-rational
/// coefficients. Zero coefficients are never stored.
class LaurentPoly {
 public:
  using Terms = std::map<ExpVec, CRational, GradedLex>;

  explicit LaurentPoly(std::size_t dim = 0) : dim_(dim) {}

  static LaurentPoly constant(std::size_t dim, const CRational& c) {
    LaurentPoly p(dim);
    p.add_term(ExpVec(dim, 0), c);
    return p;
  }
  static LaurentPoly monomial(ExpVec e, const CRational& c = CRational(1)) {
    LaurentPoly p(e.size());
    p.add_term(std::move(e), c);
    return p;
  }
  /// The coordinate function x_axis (0-based axis).
  static LaurentPoly variable(std::size_t dim, std::size_t axis) {
    ExpVec e(dim, 0);
    e.at(axis) = 1;
    return monomial(std::move(e));
  }

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(),
                                              terms_.begin()->first.end(),
                                              [](int v) { return v == 0; }));
  }

  CRational coeff(const ExpVec& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? CRational(0) : it->second;
  }

  void add_term(ExpVec e, const CRational& c) {
    if (e.size() != dim_) throw DimensionError("monomial length does not match polynomial dimension");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  /// Largest monomial in graded-lex order. Requires a non-zero polynomial.
  const std::pair<const ExpVec, CRational>& leading_term() const { return *terms_.rbegin(); }

  bool has_negative_exponents() const {
    for (const auto& [e, c] : terms_)
      for (int v : e)
        if (v < 0) return true;
    return false;
  }

  LaurentPoly& operator+=(const LaurentPoly& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  LaurentPoly& operator-=(const LaurentPoly& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  LaurentPoly& operator*=(const CRational& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
  friend LaurentPoly operator-(LaurentPoly a) { return a *= CRational(-1); }
  friend LaurentPoly operator*(LaurentPoly a, const CRational& s) { return a *= s; }
  friend LaurentPoly operator*(const CRational& s, LaurentPoly a) { return a *= s; }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    a.check_dim(b);
    LaurentPoly out(a.dim_);
    ExpVec e(a.dim_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t k = 0; k < a.dim_; ++k) e[k] = ea[k] + eb[k];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

 private:
  void check_dim(const LaurentPoly& o) const {
    if (o.dim_ != dim_) {
      throw DimensionError("polynomial dimension mismatch: " + std::to_string(dim_) + " vs " +
                           std::to_string(o.dim_));
    }
  }

  std::size_t dim_;
  Terms terms_;
};

/// Vector field with polynomial components.
struct VField {
  std::vector<LaurentPoly> comps;

  VField() = default;
  explicit VField(std::vector<LaurentPoly> c) : comps(std::move(c)) {
    for (const auto& p : comps)
      if (p.dim() != comps.size()) throw DimensionError("vector field component dimension mismatch");
  }
  static VField zero(std::size_t n) { return VField(std::vector<LaurentPoly>(n, LaurentPoly(n))); }

  std::size_t dim() const { return comps.size(); }
  const LaurentPoly& operator[](std::size_t i) const { return comps[i]; }
  LaurentPoly& operator[](std::size_t i) { return comps[i]; }

  bool is_zero() const {
    return std::all_of(comps.begin(), comps.end(), [](const LaurentPoly& p) { return p.is_zero(); });
  }

  friend VField operator+(VField a, const VField& b) {
    if (a.dim() != b.dim()) throw DimensionError("vector field dimension mismatch");
    for (std::size_t i = 0; i < a.dim(); ++i) a.comps[i] += b.comps[i];
    return a;
  }
  friend VField operator-(VField a, const VField& b) {
    if (a.dim() != b.dim()) throw DimensionError("vector field dimension mismatch");
    for (std::size_t i = 0; i < a.dim(); ++i) a.comps[i] -= b.comps[i];
    return a;
  }
  friend VField operator*(const CRational& s, VField a) {
    for (auto& p : a.comps) p *= s;
    return a;
  }
  friend bool operator==(const VField& a, const VField& b) { return a.comps == b.comps; }
};

/// Square matrix of polynomials, row-major.
using PolyMatrix = std::vector<std::vector<LaurentPoly>>;

/// Partial derivative along a 0-based axis; power rule holds for negative
/// exponents as well.
inline LaurentPoly differentiate(const LaurentPoly& p, std::size_t axis) {
  if (axis >= p.dim()) throw DimensionError("differentiation axis out of range");
  LaurentPoly out(p.dim());
  for (const auto& [e, c] : p.terms()) {
    const int k = e[axis];
    if (k == 0) continue;
    ExpVec d = e;
    d[axis] = k - 1;
    out.add_term(std::move(d), c * CRational(k));
  }
  return out;
}

inline VField gradient(const LaurentPoly& p) {
  std::vector<LaurentPoly> g;
  g.reserve(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) g.push_back(differentiate(p, i));
  return VField(std::move(g));
}

inline PolyMatrix hessian(const LaurentPoly& p) {
  const std::size_t n = p.dim();
  PolyMatrix h(n, std::vector<LaurentPoly>(n, LaurentPoly(n)));
  for (std::size_t i = 0; i < n; ++i) {
    const LaurentPoly di = differentiate(p, i);
    for (std::size_t j = i; j < n; ++j) {
      h[i][j] = differentiate(di, j);
      if (j != i) h[j][i] = h[i][j];
    }
  }
  return h;
}

/// Row i is the gradient of component i.
inline PolyMatrix jacobian(const VField& v) {
  PolyMatrix j;
  j.reserve(v.dim());
  for (const auto& c : v.comps) j.push_back(gradient(c).comps);
  return j;
}

inline LaurentPoly dot(const VField& a, const VField& b) {
  if (a.dim() != b.dim()) throw DimensionError("inner product dimension mismatch");
  LaurentPoly out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out += a[i] * b[i];
  return out;
}

inline VField matvec(const PolyMatrix& m, const VField& v) {
  const std::size_t n = v.dim();
  if (m.size() != n) throw DimensionError("matrix-vector dimension mismatch");
  VField out = VField::zero(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += m[i][j] * v[j];
  return out;
}

/// v^T M v
inline LaurentPoly quadratic_form(const PolyMatrix& m, const VField& v) {
  return dot(v, matvec(m, v));
}

namespace detail {

template <class T>
T int_power(const T& base, int k) {
  T result(1);
  T b = base;
  unsigned u = static_cast<unsigned>(k < 0 ? -k : k);
  while (u) {
    if (u & 1u) result *= b;
    b *= b;
    u >>= 1u;
  }
  return result;
}

}  // namespace detail

/// Floating evaluation. Throws PoleError at a zero coordinate of an axis
/// that carries a negative exponent.
inline std::complex<double> evaluate(const LaurentPoly& p, std::span<const std::complex<double>> x) {
  if (x.size() != p.dim()) throw DimensionError("evaluation point dimension mismatch");
  std::complex<double> acc = 0.0;
  for (const auto& [e, c] : p.terms()) {
    std::complex<double> term = c.to_complex();
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (e[k] < 0) {
        if (x[k] == 0.0) throw PoleError("pole: coordinate " + std::to_string(k + 1) + " is zero");
        term /= detail::int_power(x[k], e[k]);
      } else {
        term *= detail::int_power(x[k], e[k]);
      }
    }
    acc += term;
  }
  return acc;
}

inline std::complex<double> evaluate(const LaurentPoly& p, std::initializer_list<std::complex<double>> x) {
  return evaluate(p, std::span<const std::complex<double>>(x.begin(), x.size()));
}

/// Exact evaluation at a complex-rational point.
inline CRational evaluate_exact(const LaurentPoly& p, std::span<const CRational> x) {
  if (x.size() != p.dim()) throw DimensionError("evaluation point dimension mismatch");
  CRational acc(0);
  for (const auto& [e, c] : p.terms()) {
    CRational term = c;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (e[k] < 0) {
        if (x[k].is_zero()) throw PoleError("pole: coordinate " + std::to_string(k + 1) + " is zero");
        term /= detail::int_power(x[k], e[k]);
      } else {
        term *= detail::int_power(x[k], e[k]);
      }
    }
    acc += term;
  }
  return acc;
}

}  // namespace sdefi
