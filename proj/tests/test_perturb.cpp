#include <gtest/gtest.h>

#include <set>

#include <Eigen/Dense>

#include "fixtures.hpp"

using namespace sdefi;
using namespace testing_support;

TEST(Exponents, SmallCases) {
  EXPECT_EQ(separation_exponents(1), (std::vector<std::int64_t>{1}));
  EXPECT_EQ(separation_exponents(3), (std::vector<std::int64_t>{1, 2, 6}));
  EXPECT_EQ(separation_exponents(4), (std::vector<std::int64_t>{1, 2, 6, 18}));
}

TEST(Exponents, GrowByThreeAfterTheSecond) {
  const auto a = separation_exponents(12);
  for (std::size_t k = 2; k < a.size(); ++k) EXPECT_EQ(a[k], 3 * a[k - 1]);
}

TEST(Exponents, PairSumsAreDistinct) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto a = separation_exponents(n);
    std::set<std::int64_t> sums;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) EXPECT_TRUE(sums.insert(a[i] + a[j]).second) << n;
  }
}

TEST(Residual, MatchesTwiceTheGeneratorEigenvalue) {
  // dy = diag(lambda) y dt + diag(mu) y dB maps y^l to an eigenvalue multiple of y^l.
  Rng rng(91);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
    VField f = VField::zero(n), g = VField::zero(n);
    std::vector<std::complex<double>> lam, mu;
    for (std::size_t i = 0; i < n; ++i) {
      const CRational a = rng.complex_rational(), b = rng.complex_rational(false);
      f[i] = a * LaurentPoly::variable(n, i);
      g[i] = b * LaurentPoly::variable(n, i);
      lam.push_back(a.to_complex());
      mu.push_back(b.to_complex());
    }
    const SdeSystem sys(f, {g});
    ExpVec l(n);
    for (auto& v : l) v = rng.uniform(0, 5);
    const CRational eig = weak_generator_apply(sys, LaurentPoly::monomial(l)).coeff(l);
    EXPECT_NEAR(std::abs(perturbation_residual(lam, mu, l) - 2.0 * eig.to_complex()), 0.0, 1e-9);
  }
}

TEST(Pipeline, HarmonicOscillator) {
  const SdeSystem sys = load("harmonic").system;
  const IntegralBasis unperturbed = find_first_integrals(sys, IntegralMode::strong, 1, 2);
  ASSERT_EQ(unperturbed.basis.size(), 1u);
  EXPECT_EQ(unperturbed.basis[0], P("x1^2 + x2^2", sys.var_names));

  const PerturbationPlan plan = build_perturbation(sys.drift, 0.37, 8);
  EXPECT_EQ(plan.exponents, (std::vector<std::int64_t>{1, 2}));
  EXPECT_DOUBLE_EQ(plan.u, 0.37);
  EXPECT_EQ(plan.attempts, 1);
  EXPECT_EQ(plan.det_jacobian, CRational(1));
  const PerturbationVerdict v = verify_perturbation(sys.drift, plan, 4);
  EXPECT_TRUE(v.pass);
  EXPECT_TRUE(v.counterexamples.empty());
}

TEST(Plan, NoiseMatrixHasPrescribedSpectrum) {
  const SdeSystem sys = load("harmonic").system;
  for (double u : {0.2, 0.37, 0.6}) {
    const PerturbationPlan plan = build_perturbation(sys.drift, u, 6);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(plan.p_exact));
    std::vector<double> got;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      EXPECT_NEAR(es.eigenvalues()(i).imag(), 0.0, 1e-8);
      got.push_back(es.eigenvalues()(i).real());
    }
    std::sort(got.begin(), got.end());
    EXPECT_NEAR(got[0], u * u, 1e-8);
    EXPECT_NEAR(got[1], u, 1e-8);
    // P commutes with Df(0) up to rounding of the exact conversion.
    const Eigen::MatrixXcd a = to_eigen(linear_part(sys.drift));
    EXPECT_LT((a * plan.p_numeric - plan.p_numeric * a).norm(), 1e-12);
  }
}

TEST(Plan, DiagonalSaddleProceeds) {
  const auto names = xs(2);
  const VField f({P("x1", names), P("-x2", names)});
  const PerturbationPlan plan = build_perturbation(f, 0.37, 8);
  EXPECT_TRUE(is_diagonal(plan.p_exact));
  EXPECT_TRUE(verify_perturbation(f, plan, 4).pass);
}

TEST(Plan, RobustAcrossBaseValues) {
  const SdeSystem sys = load("harmonic").system;
  for (double u : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const PerturbationPlan plan = build_perturbation(sys.drift, u, 8);
    EXPECT_TRUE(verify_perturbation(sys.drift, plan, 4).pass) << u;
  }
}

TEST(Plan, RetriesWhenTheResidualVanishes) {
  // f = -x/8, u = 1/2: residual l (l - 2) / 4 vanishes at l = 2.
  const auto names = xs(1);
  const VField f({P("-1/8*x1", names)});
  const PerturbationPlan plan = build_perturbation(f, 0.5, 8);
  EXPECT_GT(plan.attempts, 1);
  EXPECT_NE(plan.u, 0.5);
  EXPECT_GT(plan.residual_min, 1e-12);
  // Same seed, same retry sequence.
  EXPECT_EQ(build_perturbation(f, 0.5, 8).u, plan.u);
  PerturbationOptions none;
  none.max_retries = 0;
  EXPECT_THROW(build_perturbation(f, 0.5, 8, none), NumericError);
}

TEST(Plan, Preconditions) {
  const auto names = xs(2);
  EXPECT_THROW(build_perturbation(VField({P("x2^2", names), P("x1", names)}), 0.37, 8), PreconditionError);
  EXPECT_THROW(build_perturbation(VField({P("x1", names), P("x2", names)}), 0.37, 8), PreconditionError);
  EXPECT_THROW(build_perturbation(VField({P("x1 + 1", names), P("x2", names)}), 0.37, 8), PreconditionError);
  const VField ok({P("x1", names), P("-x2", names)});
  EXPECT_THROW(build_perturbation(ok, 1.5, 8), InputError);
  EXPECT_THROW(build_perturbation(ok, 0.37, 0), InputError);
}

TEST(Plan, UnperturbedIntegralIsDestroyed) {
  // The energy of the harmonic oscillator is no longer weak after the perturbation.
  const SdeSystem sys = load("harmonic").system;
  const PerturbationPlan plan = build_perturbation(sys.drift, 0.37, 8);
  const SdeSystem perturbed = perturbed_system(sys.drift, plan, sys.var_names);
  EXPECT_FALSE(check_weak(perturbed, P("x1^2 + x2^2", sys.var_names)).holds);
}
