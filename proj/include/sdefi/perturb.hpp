#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdefi/resonance.hpp"
#include "sdefi/search.hpp"
#include "sdefi/spectral.hpp"

namespace sdefi {

/// a_1 = 1, a_k = 2 (a_1 + ... + a_{k-1}).
inline std::vector<std::int64_t> separation_exponents(std::size_t n) {
  std::vector<std::int64_t> a;
  std::int64_t sum = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t next = k == 0 ? 1 : 2 * sum;
    a.push_back(next);
    sum += next;
  }
  return a;
}

/// 2 sum lambda_i l_i + sum l_i (l_i - 1) mu_i^2 + sum_{i != j} l_i l_j mu_i mu_j,
/// twice the generator eigenvalue on y^l for dy = Lambda y dt + diag(mu) y dB.
inline std::complex<double> perturbation_residual(const std::vector<std::complex<double>>& lambda,
                                                  const std::vector<std::complex<double>>& mu, const ExpVec& l) {
  std::complex<double> acc = 0.0;
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double li = l[i];
    acc += 2.0 * lambda[i] * li;
    acc -= li * mu[i] * mu[i];  // (sum l_i mu_i)^2 - sum l_i mu_i^2 expands to the two sums
    s += li * mu[i];
  }
  return acc + s * s;
}

struct PerturbationOptions {
  double tol = 1e-12;
  int max_retries = 20;
  std::uint64_t seed = 1;
};

struct PerturbationPlan {
  Eigen::MatrixXcd q;                        // eigenbasis of Df(0), columns
  std::vector<std::complex<double>> lambda;  // eigenvalues of Df(0) in column order
  std::vector<std::int64_t> exponents;
  double u = 0.0;
  std::vector<std::complex<double>> mu;  // u^{a_i}
  Eigen::MatrixXcd p_numeric;            // Q diag(mu) Q^-1
  QMatrix p_exact;                       // p_numeric converted exactly (entries below 1e-15 relative flushed)
  CRational det_jacobian;
  int verified_to = 0;
  double residual_min = 0.0;  // smallest relative |residual| over 0 < |l|_1 <= verified_to
  int attempts = 0;
};

/// Builds P such that dx = f dt + P x dB has no weak first integral, the
/// noise eigenvalues being u^{a_i} in the eigenbasis of Df(0). The residual
/// is checked for every 0 < |l|_1 <= bound; on failure further u values are
/// drawn from a seeded sequence.
inline PerturbationPlan build_perturbation(const VField& f, double u, int bound, const PerturbationOptions& opt = {}) {
  if (!vanishes_at_origin(f)) throw PreconditionError("drift does not vanish at the origin (f(0) != 0)");
  if (bound < 1) throw InputError("verification bound L must be at least 1");
  if (!(u > 0.0 && u < 1.0)) throw InputError("base value u must lie in (0, 1)");
  const QMatrix a = linear_part(f);
  const std::size_t n = a.rows();
  PerturbationPlan plan;
  plan.det_jacobian = determinant(a);
  if (plan.det_jacobian.is_zero()) throw PreconditionError("Df(0) is singular (det Df(0) = 0)");
  const UPoly cp = characteristic_polynomial(a);
  if (!is_squarefree(cp))
    throw PreconditionError("Df(0) has repeated eigenvalues; only the distinct-eigenvalue case is supported");

  if (is_diagonal(a)) {
    plan.q = Eigen::MatrixXcd::Identity(n, n);
    for (std::size_t i = 0; i < n; ++i) plan.lambda.push_back(a(i, i).to_complex());
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(to_eigen(a));
    if (solver.info() != Eigen::Success) throw NumericError("eigen-decomposition of Df(0) failed");
    plan.q = solver.eigenvectors();
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) plan.lambda.push_back(solver.eigenvalues()(i));
  }
  for (const auto& l : plan.lambda)
    if (std::abs(l) == 0.0) throw PreconditionError("Df(0) has a zero eigenvalue");
  plan.exponents = separation_exponents(n);
  plan.verified_to = bound;

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> draw(0.05, 0.95);
  std::string last_failure;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    const double cand = attempt == 0 ? u : draw(rng);
    std::vector<std::complex<double>> mu;
    for (auto e : plan.exponents) mu.emplace_back(std::pow(cand, static_cast<double>(e)), 0.0);
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    detail::for_each_lattice_vector(n, bound, Lattice::zplus, [&](const ExpVec& l) {
      if (!ok) return;
      double scale = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        scale += 2.0 * std::abs(plan.lambda[i]) * l[i];
        for (std::size_t j = 0; j < n; ++j) scale += static_cast<double>(l[i]) * l[j] * std::abs(mu[i] * mu[j]);
      }
      const double rel = std::abs(perturbation_residual(plan.lambda, mu, l)) / scale;
      worst = std::min(worst, rel);
      if (rel <= opt.tol) {
        ok = false;
        last_failure = "u = " + std::to_string(cand) + " gives a vanishing residual at l = (";
        for (std::size_t i = 0; i < n; ++i) last_failure += (i ? "," : "") + std::to_string(l[i]);
        last_failure += ")";
      }
    });
    plan.attempts = attempt + 1;
    if (!ok) continue;
    plan.u = cand;
    plan.mu = mu;
    plan.residual_min = worst;
    Eigen::MatrixXcd lam1 = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) lam1(i, i) = mu[i];
    plan.p_numeric = plan.q * lam1 * plan.q.inverse();
    const double pmax = plan.p_numeric.cwiseAbs().maxCoeff();
    plan.p_exact = QMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> z = plan.p_numeric(i, j);
        if (std::abs(z.real()) < 1e-15 * pmax) z.real(0.0);
        if (std::abs(z.imag()) < 1e-15 * pmax) z.imag(0.0);
        plan.p_exact(i, j) = CRational::from_complex(z);
      }
    }
    return plan;
  }
  throw NumericError("no admissible u found after " + std::to_string(opt.max_retries + 1) + " attempts; " +
                     last_failure);
}

/// dx = f dt + P x dB with P taken exactly from the plan.
inline SdeSystem perturbed_system(const VField& f, const PerturbationPlan& plan,
                                  std::vector<std::string> names = {}) {
  const std::size_t n = f.dim();
  VField g = VField::zero(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i] += plan.p_exact(i, j) * LaurentPoly::variable(n, j);
  return SdeSystem(f, {g}, std::move(names));
}

struct PerturbationVerdict {
  bool pass = false;
  int degree = 0;
  std::vector<LaurentPoly> counterexamples;
  std::string note;
};

/// Bounded check: no weak polynomial first integral of degree 1..degree.
inline PerturbationVerdict verify_perturbation(const VField& f, const PerturbationPlan& plan, int degree) {
  const SdeSystem sys = perturbed_system(f, plan);
  const IntegralBasis found = find_first_integrals(sys, IntegralMode::weak, 1, degree);
  PerturbationVerdict v;
  v.degree = degree;
  v.pass = found.basis.empty();
  v.counterexamples = found.basis;
  v.note = "polynomial weak first integrals of total degree 1.." + std::to_string(degree) +
           " excluded; higher degrees and non-polynomial analytic integrals are not checked";
  return v;
}

}  // namespace sdefi
