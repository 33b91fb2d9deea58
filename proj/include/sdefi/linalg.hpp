#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sdefi/error.hpp"
#include "sdefi/rational.hpp"

namespace sdefi {

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& row : init) {
      if (row.size() != cols_) throw DimensionError("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using QMatrix = Matrix<CRational>;

inline QMatrix operator+(const QMatrix& a, const QMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix sum shape mismatch");
  QMatrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

inline QMatrix operator-(const QMatrix& a, const QMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix difference shape mismatch");
  QMatrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

inline QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product shape mismatch");
  QMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

inline QMatrix operator*(const CRational& s, QMatrix a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) *= s;
  return a;
}

inline CRational trace(const QMatrix& a) {
  CRational t(0);
  for (std::size_t i = 0; i < a.rows() && i < a.cols(); ++i) t += a(i, i);
  return t;
}

inline bool is_zero(const QMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!a(i, j).is_zero()) return false;
  return true;
}

inline bool is_diagonal(const QMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j && !a(i, j).is_zero()) return false;
  return true;
}

inline QMatrix commutator(const QMatrix& a, const QMatrix& b) { return a * b - b * a; }

/// Gaussian integer a + bi with arbitrary-precision parts.
struct GaussInt {
  mpz_class re{0};
  mpz_class im{0};

  GaussInt() = default;
  GaussInt(long v) : re(v) {}  // NOLINT(google-explicit-constructor)
  GaussInt(mpz_class r, mpz_class i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }

  friend GaussInt operator*(const GaussInt& a, const GaussInt& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussInt operator-(const GaussInt& a, const GaussInt& b) { return {a.re - b.re, a.im - b.im}; }
  friend GaussInt operator-(const GaussInt& a) { return {-a.re, -a.im}; }
  friend bool operator==(const GaussInt& a, const GaussInt& b) { return a.re == b.re && a.im == b.im; }

  /// Quotient when b divides a exactly in Z[i].
  friend GaussInt divexact(const GaussInt& a, const GaussInt& b) {
    const mpz_class n = b.re * b.re + b.im * b.im;
    mpz_class r = a.re * b.re + a.im * b.im;
    mpz_class i = a.im * b.re - a.re * b.im;
    mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
    mpz_divexact(i.get_mpz_t(), i.get_mpz_t(), n.get_mpz_t());
    return {std::move(r), std::move(i)};
  }

  CRational to_crational() const { return {mpq_class(re), mpq_class(im)}; }
};

/// Reduced row echelon form computed fraction-free over Z[i]: every pivot
/// entry equals `scale`, and the true RREF is `reduced / scale`.
struct FractionFreeEchelon {
  Matrix<GaussInt> reduced;
  std::vector<std::size_t> pivot_cols;
  GaussInt scale{1};

  std::size_t rank() const { return pivot_cols.size(); }
};

namespace detail {

// Scales each row by the lcm of its denominators so entries lie in Z[i];
// row scaling preserves the row space and the nullspace.
inline Matrix<GaussInt> to_gaussian_integers(const QMatrix& a) {
  Matrix<GaussInt> m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).re().get_den_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).im().get_den_mpz_t());
    }
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const mpq_class r = a(i, j).re() * l;
      const mpq_class im = a(i, j).im() * l;
      m(i, j) = GaussInt(r.get_num(), im.get_num());
    }
  }
  return m;
}

}  // namespace detail

/// Fraction-free Gauss-Jordan elimination (Bareiss update applied to all
/// rows). Every intermediate entry is a minor of the input, so each
/// division is exact.
inline FractionFreeEchelon fraction_free_rref(const QMatrix& a) {
  FractionFreeEchelon out;
  out.reduced = detail::to_gaussian_integers(a);
  Matrix<GaussInt>& m = out.reduced;
  GaussInt prev(1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, r);
    const GaussInt piv = m(r, c);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r) continue;
      const GaussInt factor = m(i, c);
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j == c) continue;
        GaussInt v = piv * m(i, j);
        if (!factor.is_zero() && !m(r, j).is_zero()) v = v - factor * m(r, j);
        m(i, j) = v.is_zero() ? GaussInt(0) : divexact(v, prev);
      }
      m(i, c) = GaussInt(0);
    }
    prev = piv;
    out.pivot_cols.push_back(c);
    ++r;
  }
  out.scale = prev;
  return out;
}

inline std::size_t rank(const QMatrix& a) { return fraction_free_rref(a).rank(); }

/// Basis of {x : a x = 0}, one vector per non-pivot column; vector for free
/// column f has entry 1 at f.
inline std::vector<std::vector<CRational>> nullspace(const QMatrix& a) {
  const FractionFreeEchelon e = fraction_free_rref(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t c : e.pivot_cols) is_pivot[c] = true;
  const CRational scale = e.scale.to_crational();
  std::vector<std::vector<CRational>> basis;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<CRational> v(a.cols(), CRational(0));
    v[f] = CRational(1);
    for (std::size_t k = 0; k < e.pivot_cols.size(); ++k) {
      const GaussInt& entry = e.reduced(k, f);
      if (!entry.is_zero()) v[e.pivot_cols[k]] = -(entry.to_crational() / scale);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::string to_string(const QMatrix& a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.rows(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < a.cols(); ++j) s += (j ? ", " : "") + a(i, j).to_string();
    s += "]";
  }
  return s + "]";
}

}  // namespace sdefi
