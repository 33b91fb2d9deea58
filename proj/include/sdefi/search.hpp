#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdefi/ito.hpp"
#include "sdefi/linalg.hpp"
#include "sdefi/parallel.hpp"
#include "sdefi/resonance.hpp"

namespace sdefi {

/// Monomials whose total degree lies in [dmin, dmax], in graded-lex order.
/// With dmin >= 0 the exponents are nonnegative; with dmin < 0 each single
/// exponent is additionally confined to [dmin, dmax] so the set is finite.
struct MonomialBasis {
  std::size_t dim = 0;
  int dmin = 0;
  int dmax = 0;
  std::vector<ExpVec> monomials;

  static MonomialBasis window(std::size_t n, int dmin, int dmax) {
    if (dmin > dmax) throw InputError("empty degree window: dmin > dmax");
    if (n == 0) throw InputError("zero-dimensional system");
    MonomialBasis b{n, dmin, dmax, {}};
    const int lo = std::min(dmin, 0);
    const int hi = dmax;
    ExpVec e(n, 0);
    auto rec = [&](auto&& self, std::size_t pos, int sum) -> void {
      if (pos == n) {
        if (sum >= dmin && sum <= dmax) b.monomials.push_back(e);
        return;
      }
      const int top = lo == 0 ? hi - sum : hi;
      for (int v = lo; v <= top; ++v) {
        e[pos] = v;
        self(self, pos + 1, sum + v);
      }
    };
    rec(rec, 0, 0);
    std::sort(b.monomials.begin(), b.monomials.end(), GradedLex{});
    return b;
  }

  std::size_t size() const { return monomials.size(); }

  bool contains_constant() const {
    return std::any_of(monomials.begin(), monomials.end(),
                       [](const ExpVec& e) { return std::all_of(e.begin(), e.end(), [](int v) { return v == 0; }); });
  }

  MonomialBasis without_constant() const {
    MonomialBasis b = *this;
    std::erase_if(b.monomials, [](const ExpVec& e) { return std::all_of(e.begin(), e.end(), [](int v) { return v == 0; }); });
    return b;
  }
};

/// Linear operator acting on candidate integrals.
struct OperatorKind {
  enum class Type { weak, strong_drift, strong_diffusion } type = Type::weak;
  std::size_t diffusion_index = 0;  // for strong_diffusion

  static OperatorKind weak() { return {Type::weak, 0}; }
  static OperatorKind strong_drift() { return {Type::strong_drift, 0}; }
  static OperatorKind strong_diffusion(std::size_t i) { return {Type::strong_diffusion, i}; }
};

/// Exact matrix of an operator: column j holds the coefficients of
/// L(monomial_j) over `rows`. Rows are the union of the input monomials and
/// every monomial produced, so no output term is ever truncated.
struct OperatorMatrix {
  MonomialBasis columns;
  std::vector<ExpVec> rows;
  std::vector<std::map<std::size_t, CRational>> column_entries;  // row index -> value

  std::size_t row_index(const ExpVec& e) const {
    auto it = std::lower_bound(rows.begin(), rows.end(), e, GradedLex{});
    if (it == rows.end() || *it != e) return rows.size();
    return static_cast<std::size_t>(it - rows.begin());
  }

  CRational entry(const ExpVec& row, std::size_t col) const {
    const std::size_t r = row_index(row);
    if (r == rows.size()) return CRational(0);
    auto it = column_entries.at(col).find(r);
    return it == column_entries[col].end() ? CRational(0) : it->second;
  }

  QMatrix dense() const {
    QMatrix m(rows.size(), columns.size());
    for (std::size_t j = 0; j < column_entries.size(); ++j)
      for (const auto& [r, v] : column_entries[j]) m(r, j) = v;
    return m;
  }
};

namespace detail {

inline LaurentPoly apply_operator(const SdeSystem& sys, const VField& corrected, OperatorKind kind,
                                  const LaurentPoly& phi) {
  switch (kind.type) {
    case OperatorKind::Type::weak: return weak_generator_apply(sys, phi);
    case OperatorKind::Type::strong_drift: return dot(gradient(phi), corrected);
    case OperatorKind::Type::strong_diffusion: return dot(gradient(phi), sys.diffusions.at(kind.diffusion_index));
  }
  return LaurentPoly(sys.dim());
}

}  // namespace detail

inline OperatorMatrix operator_matrix(const SdeSystem& sys, const MonomialBasis& basis, OperatorKind kind) {
  if (basis.dim != sys.dim()) throw DimensionError("monomial basis dimension does not match system");
  if (kind.type == OperatorKind::Type::strong_diffusion && kind.diffusion_index >= sys.noise_dim())
    throw InputError("diffusion index out of range");
  const VField corrected = kind.type == OperatorKind::Type::strong_drift ? stratonovich_drift(sys) : VField{};

  std::vector<LaurentPoly> images(basis.size());
  parallel_for(basis.size(), [&](std::size_t j) {
    images[j] = detail::apply_operator(sys, corrected, kind, LaurentPoly::monomial(basis.monomials[j]));
  });

  OperatorMatrix om;
  om.columns = basis;
  std::vector<ExpVec> rows = basis.monomials;
  for (const auto& img : images)
    for (const auto& [e, c] : img.terms()) rows.push_back(e);
  std::sort(rows.begin(), rows.end(), GradedLex{});
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  om.rows = std::move(rows);
  om.column_entries.resize(basis.size());
  for (std::size_t j = 0; j < images.size(); ++j)
    for (const auto& [e, c] : images[j].terms()) om.column_entries[j].emplace(om.row_index(e), c);
  return om;
}

struct IntegralBasis {
  IntegralMode mode = IntegralMode::weak;
  int dmin = 0;
  int dmax = 0;
  /// Canonical: leading graded-lex coefficient 1, distinct leading monomials.
  std::vector<LaurentPoly> basis;
  std::size_t independence_rank = 0;
  /// Monomials searched (constant excluded) and rank of the stacked matrix.
  std::size_t monomial_count = 0;
  std::size_t operator_rank = 0;
};

/// Generic rank of the Jacobian of the tuple, estimated as the maximum
/// numeric rank over random rational sample points; a lower bound on the
/// number of functionally independent elements.
inline std::size_t independence_rank(const std::vector<LaurentPoly>& basis, std::uint64_t seed = 0xC0FFEEULL) {
  if (basis.empty()) throw InputError("independence rank of an empty tuple");
  const std::size_t n = basis.front().dim();
  std::vector<VField> grads;
  for (const auto& p : basis) grads.push_back(gradient(p));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 5);
  std::size_t best = 0;
  int samples = 0;
  for (int attempt = 0; attempt < 100 && samples < 5; ++attempt) {
    std::vector<std::complex<double>> x(n);
    for (auto& xi : x) xi = static_cast<double>(num(rng)) / den(rng);
    Eigen::MatrixXcd jac(basis.size(), n);
    try {
      for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t k = 0; k < n; ++k) jac(i, k) = evaluate(grads[i][k], x);
        // The function itself must be finite at the point as well.
        (void)evaluate(basis[i], x);
      }
    } catch (const PoleError&) {
      continue;
    }
    ++samples;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-8 * smax && smax > 0.0) ++r;
    best = std::max(best, r);
  }
  if (samples == 0) throw NumericError("no pole-free sample point found after 100 tries");
  return best;
}

namespace detail {

// Row-reduces the coefficient vectors with columns in descending graded-lex
// order so the basis is canonical and each element has leading coefficient 1.
inline std::vector<LaurentPoly> canonical_basis(const std::vector<std::vector<CRational>>& vectors,
                                                const MonomialBasis& basis) {
  if (vectors.empty()) return {};
  const std::size_t m = basis.size();
  QMatrix a(vectors.size(), m);
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = vectors[i][m - 1 - j];
  const FractionFreeEchelon e = fraction_free_rref(a);
  const CRational scale = e.scale.to_crational();
  std::vector<LaurentPoly> out;
  for (std::size_t r = 0; r < e.rank(); ++r) {
    LaurentPoly p(basis.dim);
    for (std::size_t j = 0; j < m; ++j) {
      const GaussInt& v = e.reduced(r, j);
      if (!v.is_zero()) p.add_term(basis.monomials[m - 1 - j], v.to_crational() / scale);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

/// Every Laurent-polynomial first integral supported on the degree window,
/// as an exact nullspace basis (constants removed). Strong mode stacks the
/// corrected-drift operator with every diffusion operator.
inline IntegralBasis find_first_integrals(const SdeSystem& sys, IntegralMode mode, int dmin, int dmax) {
  const MonomialBasis basis = MonomialBasis::window(sys.dim(), dmin, dmax).without_constant();
  IntegralBasis out;
  out.mode = mode;
  out.dmin = dmin;
  out.dmax = dmax;
  out.monomial_count = basis.size();
  if (basis.size() == 0) return out;

  std::vector<OperatorMatrix> blocks;
  if (mode == IntegralMode::weak) {
    blocks.push_back(operator_matrix(sys, basis, OperatorKind::weak()));
  } else {
    blocks.push_back(operator_matrix(sys, basis, OperatorKind::strong_drift()));
    for (std::size_t i = 0; i < sys.noise_dim(); ++i)
      blocks.push_back(operator_matrix(sys, basis, OperatorKind::strong_diffusion(i)));
  }
  std::size_t total_rows = 0;
  for (const auto& b : blocks) total_rows += b.rows.size();
  QMatrix stacked(total_rows, basis.size());
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t j = 0; j < b.column_entries.size(); ++j)
      for (const auto& [r, v] : b.column_entries[j]) stacked(offset + r, j) = v;
    offset += b.rows.size();
  }
  const auto kernel = nullspace(stacked);
  out.operator_rank = basis.size() - kernel.size();
  out.basis = detail::canonical_basis(kernel, basis);
  for (const auto& p : out.basis) {
    if (!check(mode, sys, p).holds)
      throw std::logic_error("internal error: nullspace element failed exact re-verification");
  }
  if (!out.basis.empty()) out.independence_rank = independence_rank(out.basis);
  return out;
}

struct CountBoundCheck {
  std::size_t rank = 0;
  std::size_t s_min = 0;
  bool report_certified = false;
  bool consistent = true;
  std::string note;
};

/// Independence rank of a strong basis against the resonance-rank bound.
inline CountBoundCheck count_bound_check(const IntegralBasis& basis, const ResonanceReport& report) {
  if (basis.mode != IntegralMode::strong) throw InputError("count bound applies to strong first integrals only");
  CountBoundCheck c;
  c.rank = basis.basis.empty() ? 0 : basis.independence_rank;
  c.s_min = report.s_min;
  c.report_certified = report.s_min_certified;
  c.consistent = c.rank <= c.s_min;
  if (!c.consistent) {
    c.note = c.report_certified ? "bound violated against a certified report: implementation defect"
                                : "bound violated; the resonance report is only bounded, raise K";
  } else {
    c.note = "independent strong integrals " + std::to_string(c.rank) + " <= s_min " + std::to_string(c.s_min);
  }
  return c;
}

}  // namespace sdefi
