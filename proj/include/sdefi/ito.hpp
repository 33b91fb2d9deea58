#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sdefi/poly.hpp"
#include "sdefi/poly_text.hpp"

namespace sdefi {

/// Itô system dX = f(X) dt + sum_i g_i(X) dB^i.
struct SdeSystem {
  VField drift;
  std::vector<VField> diffusions;
  std::vector<std::string> var_names;

  SdeSystem() = default;
  SdeSystem(VField f, std::vector<VField> g, std::vector<std::string> names = {})
      : drift(std::move(f)), diffusions(std::move(g)), var_names(std::move(names)) {
    if (var_names.empty()) var_names = default_var_names(drift.dim());
    validate();
  }

  std::size_t dim() const { return drift.dim(); }
  std::size_t noise_dim() const { return diffusions.size(); }

  void validate() const {
    if (var_names.size() != dim()) throw DimensionError("variable name count does not match dimension");
    for (const auto& g : diffusions)
      if (g.dim() != dim()) throw DimensionError("diffusion field dimension does not match drift");
  }
};

enum class IntegralMode { strong, weak };

inline const char* to_string(IntegralMode m) { return m == IntegralMode::strong ? "strong" : "weak"; }

struct NamedResidual {
  std::string name;
  LaurentPoly residual;
};

struct IntegralVerdict {
  IntegralMode mode = IntegralMode::weak;
  bool holds = false;
  /// Only the non-vanishing left-hand sides are listed.
  std::vector<NamedResidual> residuals;
};

/// f - 1/2 sum_i Dg_i g_i
inline VField stratonovich_drift(const SdeSystem& sys) {
  VField out = sys.drift;
  for (const auto& g : sys.diffusions) {
    const VField correction = matvec(jacobian(g), g);
    out = out - CRational(mpq_class(1, 2)) * correction;
  }
  return out;
}

/// <grad phi, f> + 1/2 sum_i g_i^T Hess(phi) g_i
inline LaurentPoly weak_generator_apply(const SdeSystem& sys, const LaurentPoly& phi) {
  if (phi.dim() != sys.dim()) throw DimensionError("candidate dimension does not match system");
  LaurentPoly out = dot(gradient(phi), sys.drift);
  if (sys.diffusions.empty()) return out;
  const PolyMatrix h = hessian(phi);
  LaurentPoly second(sys.dim());
  for (const auto& g : sys.diffusions) second += quadratic_form(h, g);
  out += CRational(mpq_class(1, 2)) * second;
  return out;
}

namespace detail {

inline void require_non_constant(const LaurentPoly& phi) {
  if (phi.is_constant()) throw ConstantCandidateError();
}

inline IntegralVerdict make_verdict(IntegralMode mode, std::vector<NamedResidual> all) {
  IntegralVerdict v;
  v.mode = mode;
  for (auto& r : all)
    if (!r.residual.is_zero()) v.residuals.push_back(std::move(r));
  v.holds = v.residuals.empty();
  return v;
}

}  // namespace detail

/// Strong first integral test: phi must be a common first integral of the
/// corrected drift and of every diffusion field.
inline IntegralVerdict check_strong(const SdeSystem& sys, const LaurentPoly& phi) {
  if (phi.dim() != sys.dim()) throw DimensionError("candidate dimension does not match system");
  detail::require_non_constant(phi);
  const VField grad = gradient(phi);
  std::vector<NamedResidual> all;
  all.push_back({"corrected_drift", dot(grad, stratonovich_drift(sys))});
  for (std::size_t i = 0; i < sys.noise_dim(); ++i)
    all.push_back({"diffusion_" + std::to_string(i + 1), dot(grad, sys.diffusions[i])});
  return detail::make_verdict(IntegralMode::strong, std::move(all));
}

/// Weak first integral test: the Itô generator annihilates phi.
inline IntegralVerdict check_weak(const SdeSystem& sys, const LaurentPoly& phi) {
  if (phi.dim() != sys.dim()) throw DimensionError("candidate dimension does not match system");
  detail::require_non_constant(phi);
  return detail::make_verdict(IntegralMode::weak, {{"generator", weak_generator_apply(sys, phi)}});
}

inline IntegralVerdict check(IntegralMode mode, const SdeSystem& sys, const LaurentPoly& phi) {
  return mode == IntegralMode::strong ? check_strong(sys, phi) : check_weak(sys, phi);
}

/// <grad<grad phi, g>, g> - g^T Hess(phi) g - <grad phi, Dg g>.
/// Vanishes identically for every phi and g (chain rule).
inline LaurentPoly lemma_identity_residual(const LaurentPoly& phi, const VField& g) {
  if (phi.dim() != g.dim()) throw DimensionError("candidate dimension does not match field");
  const VField grad = gradient(phi);
  const LaurentPoly directional = dot(grad, g);
  return dot(gradient(directional), g) - quadratic_form(hessian(phi), g) - dot(grad, matvec(jacobian(g), g));
}

}  // namespace sdefi
