#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "fixtures.hpp"

using namespace sdefi;
using namespace testing_support;

namespace {

const QMatrix cyclic_dg{{1, -2, 0}, {0, 2, -1}, {-1, 0, 1}};

}  // namespace

TEST(CharPoly, CyclicDiffusionJacobian) {
  // det(A - x I) = -x (x^2 - 4x + 5) = -x^3 + 4x^2 - 5x
  const UPoly signed_poly = characteristic_polynomial_signed(cyclic_dg);
  EXPECT_EQ(signed_poly, UPoly({CRational(0), CRational(-5), CRational(4), CRational(-1)}));
  const Spectrum s = eigenvalues(cyclic_dg);
  ASSERT_EQ(s.values.size(), 3u);
  std::vector<CRational> exact;
  for (const auto& e : s.values) {
    ASSERT_TRUE(e.exact.has_value());
    exact.push_back(*e.exact);
  }
  for (const CRational& want : {CRational(0), CRational(2, 1), CRational(2, -1)})
    EXPECT_NE(std::find(exact.begin(), exact.end(), want), exact.end()) << want;
}

TEST(CharPoly, AgreesWithCofactorDeterminantOracle) {
  Rng rng(51);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 5));
    const QMatrix a = rng.matrix(n, n, 4, t % 3 == 0);
    const UPoly p = characteristic_polynomial(a);
    EXPECT_EQ(p.degree(), static_cast<int>(n));
    EXPECT_TRUE(p.leading().is_one());
    for (int x = -2; x <= 2; ++x) {
      QMatrix m = CRational(x) * QMatrix::identity(n) - a;
      EXPECT_EQ(p(CRational(x)), cofactor_det(m));
    }
    EXPECT_EQ(determinant(a), cofactor_det(a));
    // Cayley-Hamilton
    EXPECT_TRUE(is_zero(evaluate_at_matrix(p, a)));
  }
}

TEST(Eigenvalues, AgreeWithEigenSolverOracle) {
  Rng rng(52);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 6));
    const QMatrix a = rng.matrix(n, n, 6, t % 2 == 0);
    const Spectrum s = eigenvalues(a);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
    std::vector<std::complex<double>> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
    const auto got = s.numeric();
    // Match each library eigenvalue to a distinct reference value.
    std::vector<bool> used(n, false);
    for (const auto& g : got) {
      double best = 1e300;
      std::size_t bi = 0;
      for (std::size_t k = 0; k < n; ++k)
        if (!used[k] && std::abs(ref[k] - g) < best) best = std::abs(ref[k] - g), bi = k;
      used[bi] = true;
      EXPECT_LT(best, 1e-6 * (1.0 + std::abs(g)));
    }
    for (const auto& e : s.values)
      if (e.exact) {
        EXPECT_TRUE(s.char_poly(*e.exact).is_zero());
      }
  }
}

TEST(Linearization, CyclicCorrectedMatrix) {
  for (const char* name : {"cyclic3_unbalanced", "cyclic3"}) {
    const SdeSystem sys = load(name).system;
    const SpectralData d = linearization(sys);
    EXPECT_EQ(d.drift_jacobian, (QMatrix{{2, 0, 0}, {0, 3, 0}, {-2, -3, 0}}));
    EXPECT_EQ(d.diffusion_jacobians.at(0), cyclic_dg);
    // Column sums of A0 vanish, so 0 is an eigenvalue and trace = a + b - 3.
    for (std::size_t j = 0; j < 3; ++j) {
      CRational s(0);
      for (std::size_t i = 0; i < 3; ++i) s += d.corrected(i, j);
      EXPECT_TRUE(s.is_zero());
    }
    EXPECT_EQ(trace(d.corrected), CRational(2));
    int zeros = 0;
    std::complex<double> rest = 0.0;
    for (const auto& e : d.corrected_spectrum.values) {
      if (e.exact && e.exact->is_zero()) ++zeros;
      else rest += e.value;
    }
    EXPECT_EQ(zeros, 1);
    EXPECT_NEAR(std::abs(rest - 2.0), 0.0, 1e-9);
    // beta = (a - b)^2 + 8 (a - b) - 16 = -23 for (a, b) = (2, 3)
    for (const auto& e : d.corrected_spectrum.values)
      if (!e.exact) {
        EXPECT_NEAR(std::abs(e.value.imag()), std::sqrt(23.0) / 2.0, 1e-9);
      }
  }
}

TEST(Linearization, Preconditions) {
  const auto names = xs(1);
  const SdeSystem shifted(VField({P("x1 + 1", names)}), {});
  EXPECT_THROW(linearization(shifted), PreconditionError);
  const SdeSystem laurent(VField({P("x1^3 + x1^-1", names)}), {});
  EXPECT_THROW(linearization(laurent), PreconditionError);
  EXPECT_THROW(linearization(load("two_body").system), PreconditionError);
}

TEST(Linearization, HigherOrderNoiseDetected) {
  const SpectralData d = linearization(load("lotka_volterra").system);
  EXPECT_TRUE(d.diffusion_vanishes.at(0));
  EXPECT_TRUE(d.diffusion_higher_order.at(0));
  EXPECT_TRUE(is_zero(d.diffusion_jacobians.at(0)));
  EXPECT_EQ(d.drift_jacobian, (QMatrix{{1, 0}, {0, 2}}));
}

TEST(H1, CommutingDiagonalizablePairHolds) {
  SpectralData d;
  d.drift_jacobian = QMatrix{{1, 2}, {2, 1}};
  d.diffusion_jacobians = {QMatrix{{3, 1}, {1, 3}}};
  EXPECT_EQ(h1_check(d).verdict, H1Verdict::holds);
}

TEST(H1, NonCommutingPairReportsWitness) {
  SpectralData d;
  d.drift_jacobian = QMatrix{{1, 0}, {0, 2}};
  d.diffusion_jacobians = {QMatrix{{0, 1}, {1, 0}}};
  const H1Status s = h1_check(d);
  EXPECT_EQ(s.verdict, H1Verdict::fails);
  ASSERT_TRUE(s.commutator_witness.has_value());
  EXPECT_EQ(*s.commutator_witness, commutator(d.drift_jacobian, d.diffusion_jacobians[0]));
  EXPECT_FALSE(is_zero(*s.commutator_witness));
}

TEST(H1, JordanBlockIsDefective) {
  SpectralData d;
  d.drift_jacobian = QMatrix{{1, 1}, {0, 1}};
  d.diffusion_jacobians = {QMatrix{{2, 0}, {0, 2}}};
  const H1Status s = h1_check(d);
  EXPECT_EQ(s.verdict, H1Verdict::fails);
  EXPECT_EQ(s.defective_matrix, std::optional<std::size_t>(0));
}

TEST(Diagonalizable, SimilarityTransformsOfDiagonalMatrices) {
  Rng rng(61);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(2, 4));
    QMatrix s = rng.matrix(n, n, 3);
    if (cofactor_det(s).is_zero()) continue;
    // Inverse by adjugate (independent of the library's elimination).
    QMatrix inv(n, n);
    const CRational det = cofactor_det(s);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        QMatrix minor(n - 1, n - 1);
        for (std::size_t r = 0, rr = 0; r < n; ++r) {
          if (r == j) continue;
          for (std::size_t c = 0, cc = 0; c < n; ++c)
            if (c != i) minor(rr, cc++) = s(r, c);
          ++rr;
        }
        const CRational cof = cofactor_det(minor) * CRational((i + j) % 2 ? -1 : 1);
        inv(i, j) = cof / det;
      }
    ASSERT_TRUE(is_zero(s * inv - QMatrix::identity(n)));
    QMatrix diag(n, n);
    for (std::size_t i = 0; i < n; ++i) diag(i, i) = CRational(rng.uniform(-2, 2));  // repeats allowed
    EXPECT_TRUE(is_diagonalizable(s * diag * inv));
    QMatrix jordan = diag;
    jordan(0, 0) = CRational(5);
    jordan(1, 1) = CRational(5);
    jordan(0, 1) = CRational(1);
    EXPECT_FALSE(is_diagonalizable(s * jordan * inv));
  }
}

TEST(JointSpectrum, PairsEigenvaluesAlongCommonBasis) {
  // A = diag(1, 2, 3), B = diag(5, 7, 11) conjugated by the same matrix.
  const QMatrix s{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
  const QMatrix a0{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}};
  const QMatrix b0{{5, 0, 0}, {0, 7, 0}, {0, 0, 11}};
  // s^-1 computed by hand: det = 2
  const QMatrix sinv = CRational(mpq_class(1, 2)) * QMatrix{{1, -1, 1}, {1, 1, -1}, {-1, 1, 1}};
  ASSERT_TRUE(is_zero(s * sinv - QMatrix::identity(3)));
  const QMatrix a = s * a0 * sinv, b = s * b0 * sinv;
  const auto joint = joint_spectrum({a, b}, {eigenvalues(a), eigenvalues(b)});
  std::map<long, long> pairs;
  for (std::size_t j = 0; j < 3; ++j) {
    ASSERT_TRUE(joint[0][j].exact && joint[1][j].exact);
    pairs[mpz_class(joint[0][j].exact->re().get_num()).get_si()] = mpz_class(joint[1][j].exact->re().get_num()).get_si();
  }
  EXPECT_EQ(pairs, (std::map<long, long>{{1, 5}, {2, 7}, {3, 11}}));
}
