#include <gtest/gtest.h>

#include <cstdlib>

#include "fixtures.hpp"

using namespace sdefi;
using namespace testing_support;

namespace {

long binomial(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(MonomialBasis, CountsMatchBinomialOracle) {
  for (std::size_t n = 1; n <= 4; ++n)
    for (int d = 0; d <= 4; ++d) {
      const auto b = MonomialBasis::window(n, 0, d);
      EXPECT_EQ(static_cast<long>(b.size()), binomial(static_cast<long>(n) + d, d));
      EXPECT_TRUE(std::is_sorted(b.monomials.begin(), b.monomials.end(), GradedLex{}));
    }
  const auto homogeneous = MonomialBasis::window(3, 2, 2);
  EXPECT_EQ(homogeneous.size(), 6u);
}

TEST(MonomialBasis, NegativeWindow) {
  const auto b = MonomialBasis::window(1, -1, 1);
  EXPECT_EQ(b.monomials, (std::vector<ExpVec>{{-1}, {0}, {1}}));
  const auto b2 = MonomialBasis::window(2, -1, 1);
  for (const auto& e : b2.monomials) {
    EXPECT_GE(total_degree(e), -1);
    EXPECT_LE(total_degree(e), 1);
    for (int v : e) EXPECT_TRUE(v >= -1 && v <= 1);
  }
  EXPECT_TRUE(b2.contains_constant());
  EXPECT_FALSE(b2.without_constant().contains_constant());
  EXPECT_THROW(MonomialBasis::window(2, 3, 1), InputError);
}

TEST(OperatorMatrix, DiagonalLinearDriftSpectrum) {
  // f = (x1, -2 x2), m = 0: on each homogeneous degree r the operator is
  // diagonal with entries l1 - 2 l2.
  const SdeSystem sys = load("diagonal_saddle").system;
  for (int r = 1; r <= 5; ++r) {
    const auto basis = MonomialBasis::window(2, r, r);
    const OperatorMatrix om = operator_matrix(sys, basis, OperatorKind::weak());
    const QMatrix m = om.dense();
    ASSERT_EQ(om.rows, basis.monomials);  // no monomials outside the degree
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const ExpVec& l = basis.monomials[j];
        const CRational want = i == j ? CRational(l[0] - 2 * l[1]) : CRational(0);
        EXPECT_EQ(m(i, j), want) << "degree " << r;
      }
  }
}

TEST(OperatorMatrix, ColumnsAreOperatorImages) {
  Rng rng(81);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
    const SdeSystem sys(rng.field(n, -1, 2, 3), {rng.field(n, -1, 2, 3)});
    const auto basis = MonomialBasis::window(n, -1, 2).without_constant();
    for (const auto kind : {OperatorKind::weak(), OperatorKind::strong_drift(), OperatorKind::strong_diffusion(0)}) {
      const OperatorMatrix om = operator_matrix(sys, basis, kind);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const LaurentPoly phi = LaurentPoly::monomial(basis.monomials[j]);
        LaurentPoly image(n);
        switch (kind.type) {
          case OperatorKind::Type::weak: image = weak_generator_apply(sys, phi); break;
          case OperatorKind::Type::strong_drift: image = dot(gradient(phi), stratonovich_drift(sys)); break;
          case OperatorKind::Type::strong_diffusion: image = dot(gradient(phi), sys.diffusions[0]); break;
        }
        LaurentPoly rebuilt(n);
        for (const auto& [r, v] : om.column_entries[j]) rebuilt += LaurentPoly::monomial(om.rows[r], v);
        EXPECT_EQ(rebuilt, image);
      }
    }
  }
}

TEST(Search, GbmWeakWindowFindsInverse) {
  const SdeSystem sys = load("gbm").system;
  const IntegralBasis b = find_first_integrals(sys, IntegralMode::weak, -1, 1);
  ASSERT_EQ(b.basis.size(), 1u);
  EXPECT_EQ(b.basis[0], LaurentPoly::monomial({-1}));
  EXPECT_EQ(b.independence_rank, 1u);
  EXPECT_TRUE(find_first_integrals(sys, IntegralMode::strong, -1, 1).basis.empty());
}

TEST(Search, HarmonicStrongDegreeTwo) {
  const SdeSystem sys = load("harmonic").system;
  const IntegralBasis b = find_first_integrals(sys, IntegralMode::strong, 1, 2);
  ASSERT_EQ(b.basis.size(), 1u);
  EXPECT_EQ(b.basis[0], P("x1^2 + x2^2", sys.var_names));
  const IntegralBasis b4 = find_first_integrals(sys, IntegralMode::strong, 1, 4);
  EXPECT_EQ(b4.basis.size(), 2u);  // H and H^2
  EXPECT_EQ(b4.independence_rank, 1u);
}

TEST(Search, LotkaVolterraHasNoWeakPolynomialIntegrals) {
  EXPECT_TRUE(find_first_integrals(load("lotka_volterra").system, IntegralMode::weak, 1, 4).basis.empty());
}

TEST(Search, Cyclic3StrongIntegral) {
  const SdeSystem sys = load("cyclic3").system;
  const IntegralBasis b = find_first_integrals(sys, IntegralMode::strong, 1, 2);
  const LaurentPoly sum = P("x1 + x2 + x3", sys.var_names);
  EXPECT_NE(std::find(b.basis.begin(), b.basis.end(), sum), b.basis.end());
  EXPECT_EQ(b.independence_rank, 1u);
  const ResonanceReport rep = nonintegrability_report(sys);
  const CountBoundCheck cb = count_bound_check(b, rep);
  EXPECT_TRUE(cb.consistent);
  EXPECT_EQ(cb.s_min, 1u);
}

TEST(Search, Cyclic3UnbalancedHasNoLinearStrongIntegral) {
  const SdeSystem sys = load("cyclic3_unbalanced").system;
  EXPECT_TRUE(find_first_integrals(sys, IntegralMode::strong, 1, 1).basis.empty());
}

TEST(Search, BasisIsCanonical) {
  const SdeSystem sys = load("cyclic3").system;
  const IntegralBasis b = find_first_integrals(sys, IntegralMode::weak, 1, 3);
  std::set<ExpVec> leads;
  for (const auto& p : b.basis) {
    EXPECT_TRUE(p.leading_term().second.is_one());
    EXPECT_TRUE(leads.insert(p.leading_term().first).second);
    // No other element contains this element's leading monomial.
    for (const auto& q : b.basis)
      if (&q != &p) {
        EXPECT_TRUE(q.coeff(p.leading_term().first).is_zero());
      }
  }
  EXPECT_EQ(b.basis.size(), b.monomial_count - b.operator_rank);
}

TEST(Search, KernelDimensionMatchesRankOracle) {
  Rng rng(83);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 2));
    const SdeSystem sys(rng.field(n, 0, 2, 2), {});
    const IntegralBasis b = find_first_integrals(sys, IntegralMode::weak, 1, 3);
    const auto basis = MonomialBasis::window(n, 1, 3).without_constant();
    const QMatrix m = operator_matrix(sys, basis, OperatorKind::weak()).dense();
    EXPECT_EQ(b.basis.size(), basis.size() - gauss_jordan_rank(m));
  }
}

TEST(Search, ThreadCountDoesNotChangeResult) {
  const SdeSystem sys = load("cyclic3").system;
  ::setenv("SDEFI_THREADS", "1", 1);
  const IntegralBasis one = find_first_integrals(sys, IntegralMode::strong, 1, 3);
  ::setenv("SDEFI_THREADS", "4", 1);
  const IntegralBasis four = find_first_integrals(sys, IntegralMode::strong, 1, 3);
  ::unsetenv("SDEFI_THREADS");
  EXPECT_EQ(one.basis, four.basis);
}

TEST(IndependenceRank, FunctionsOfOneIntegralHaveRankOne) {
  const auto names = xs(3);
  const LaurentPoly s = P("x1 + x2 + x3", names);
  EXPECT_EQ(independence_rank({s, s * s, s * s * s}), 1u);
  EXPECT_EQ(independence_rank({P("x1", names), P("x2*x3", names)}), 2u);
  EXPECT_THROW(independence_rank({}), InputError);
}

TEST(Search, StrongResultsAreWeakToo) {
  for (const char* name : {"harmonic", "cyclic3", "diagonal_saddle", "gbm"}) {
    const SdeSystem sys = load(name).system;
    const IntegralBasis b = find_first_integrals(sys, IntegralMode::strong, name == std::string("gbm") ? -2 : 1, 3);
    for (const auto& p : b.basis) EXPECT_TRUE(check_weak(sys, p).holds) << name;
  }
}
