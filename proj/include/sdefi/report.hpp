#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sdefi/io.hpp"
#include "sdefi/mc.hpp"
#include "sdefi/perturb.hpp"
#include "sdefi/resonance.hpp"
#include "sdefi/search.hpp"
#include "sdefi/spectral.hpp"

namespace sdefi {

inline json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_complex(std::complex<double> z) {
  if (z.imag() == 0.0) return format_double(z.real());
  return format_double(z.real()) + (z.imag() < 0 ? "-" : "+") + format_double(std::abs(z.imag())) + "i";
}

inline json poly_json(const LaurentPoly& p, const std::vector<std::string>& names) {
  return {{"text", to_string(p, names)}, {"terms", poly_terms_json(p)}};
}

inline json integral_verdict_json(const IntegralVerdict& v, const std::vector<std::string>& names) {
  json r = json::array();
  for (const auto& nr : v.residuals) r.push_back({{"name", nr.name}, {"residual", poly_json(nr.residual, names)}});
  return {{"mode", to_string(v.mode)}, {"holds", v.holds}, {"residuals", r}};
}

inline json eigenvalue_json(const Eigenvalue& e) {
  json j{{"value", complex_json(e.value)}};
  j["exact"] = e.exact ? json(e.exact->to_string()) : json(nullptr);
  return j;
}

inline json eigenvalues_json(const std::vector<Eigenvalue>& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back(eigenvalue_json(e));
  return a;
}

inline json qmatrix_json(const QMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).to_string());
    rows.push_back(row);
  }
  return rows;
}

inline json upoly_json(const UPoly& p) {
  json a = json::array();
  for (const auto& c : p.coeffs()) a.push_back(c.to_string());
  return a;  // ascending powers
}

inline json spectral_json(const SpectralData& d) {
  json j;
  j["drift_jacobian"] = qmatrix_json(d.drift_jacobian);
  j["corrected_matrix"] = qmatrix_json(d.corrected);
  j["drift_eigenvalues"] = eigenvalues_json(d.drift_spectrum.values);
  j["corrected_eigenvalues"] = eigenvalues_json(d.corrected_spectrum.values);
  j["corrected_char_poly_ascending"] = upoly_json(d.corrected_spectrum.char_poly);
  j["diffusion"] = json::array();
  for (std::size_t i = 0; i < d.diffusion_jacobians.size(); ++i) {
    j["diffusion"].push_back({{"jacobian", qmatrix_json(d.diffusion_jacobians[i])},
                              {"eigenvalues", eigenvalues_json(d.diffusion_spectra[i].values)},
                              {"char_poly_ascending", upoly_json(d.diffusion_spectra[i].char_poly)},
                              {"vanishes_at_origin", static_cast<bool>(d.diffusion_vanishes[i])},
                              {"higher_order", static_cast<bool>(d.diffusion_higher_order[i])}});
  }
  return j;
}

inline json verdict_json(const Verdict& v) {
  json h = json::array();
  for (const auto& hy : v.hypotheses) h.push_back({{"name", hy.name}, {"holds", hy.holds}});
  json j{{"verdict", to_string(v.kind)},
         {"question", v.question},
         {"theorem", v.theorem},
         {"hypotheses_checked", h},
         {"epistemic_status", v.status.to_string()},
         {"detail", v.detail}};
  if (v.count_bound) j["count_bound"] = *v.count_bound;
  if (!v.resonances.empty()) j["resonances"] = v.resonances;
  return j;
}

inline json resonance_json(const ResonanceReport& r) {
  json j;
  j["kbound"] = r.bound;
  j["tol"] = r.tol;
  j["lattice"] = to_string(r.lattice);
  j["lattices"] = json::array();
  for (const auto& l : r.lattices) {
    j["lattices"].push_back({{"label", l.label},
                             {"eigenvalues", eigenvalues_json(l.eigenvalues)},
                             {"lattice", to_string(l.lattice)},
                             {"vectors", l.vectors},
                             {"rank", l.rank},
                             {"complete", l.complete},
                             {"certificate", l.certificate}});
  }
  j["s_min"] = r.s_min;
  j["s_min_certified"] = r.s_min_certified;
  j["h1"] = {{"verdict", to_string(r.h1.verdict)}, {"reason", r.h1.reason}};
  if (r.h1.noncommuting_pair)
    j["h1"]["noncommuting_pair"] = {r.h1.noncommuting_pair->first, r.h1.noncommuting_pair->second};
  if (r.h1.commutator_witness) j["h1"]["commutator"] = qmatrix_json(*r.h1.commutator_witness);
  if (r.h1.defective_matrix) j["h1"]["defective_matrix"] = *r.h1.defective_matrix;
  j["weak_violations"] = r.weak_violations;
  j["weak_certificate"] = r.weak_certificate;
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(verdict_json(v));
  return j;
}

inline json basis_json(const IntegralBasis& b, const std::vector<std::string>& names) {
  json a = json::array();
  for (const auto& p : b.basis) a.push_back(poly_json(p, names));
  return {{"mode", to_string(b.mode)},         {"dmin", b.dmin},
          {"dmax", b.dmax},                    {"monomials_searched", b.monomial_count},
          {"operator_rank", b.operator_rank},  {"basis", a},
          {"independence_rank", b.independence_rank}};
}

inline json plan_json(const PerturbationPlan& p) {
  auto cmat = [](const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
      rows.push_back(row);
    }
    return rows;
  };
  json lam = json::array(), mu = json::array();
  for (const auto& l : p.lambda) lam.push_back(complex_json(l));
  for (const auto& m : p.mu) mu.push_back(complex_json(m));
  return {{"Q", cmat(p.q)},
          {"eigenvalues", lam},
          {"exponents", p.exponents},
          {"u", p.u},
          {"Lambda1_diagonal", mu},
          {"P", cmat(p.p_numeric)},
          {"P_exact", qmatrix_json(p.p_exact)},
          {"exactness",
           "Q and P are floating point; P_exact is the exact binary value of each floating entry and is the "
           "matrix used by the verifier"},
          {"det_jacobian", p.det_jacobian.to_string()},
          {"verified_to", p.verified_to},
          {"residual_min", p.residual_min},
          {"attempts", p.attempts}};
}

inline json sim_config_json(const SimConfig& c) {
  json x = json::array();
  for (const auto& z : c.x0) x.push_back(complex_json(z));
  return {{"x0", x},
          {"h", c.h},
          {"horizon", c.horizon},
          {"paths", c.paths},
          {"radius", c.radius},
          {"center", c.center == ExitCenter::origin ? "origin" : "x0"},
          {"seed", c.seed},
          {"scheme", "euler-maruyama"}};
}

inline json conservation_json(const ConservationReport& r, const SimConfig& cfg) {
  json thresholds{{"threshold", r.threshold}};
  if (r.mode == IntegralMode::weak) {
    thresholds["rule"] = "delta <= 3*stderr + C_bias*h";
    thresholds["C_bias"] = r.constant;
  } else {
    thresholds["rule"] = "max_dev <= C_path*sqrt(h)";
    thresholds["C_path"] = r.constant;
  }
  json j{{"mode", to_string(r.mode)},
         {"phi_x0", complex_json(r.phi0)},
         {"mean", complex_json(r.mean)},
         {"stderr", r.std_error},
         {"delta", r.delta},
         {"max_dev", r.max_dev},
         {"n_used", r.n_used},
         {"n_excluded", r.n_excluded},
         {"n_exited", r.n_exited},
         {"pass", r.pass},
         {"inconclusive", r.inconclusive},
         {"thresholds", thresholds},
         {"stopping_times", r.stopping},
         {"config", sim_config_json(cfg)}};
  return j;
}

// ---------------------------------------------------------------------------
// Text rendering

inline std::string eigenvalue_text(const Eigenvalue& e) {
  return e.exact ? e.exact->to_string() + " (exact)" : format_complex(e.value);
}

inline std::string vector_text(const ExpVec& k) {
  std::string s = "(";
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s + ")";
}

inline std::string integral_verdict_text(const std::string& label, const IntegralVerdict& v,
                                         const std::vector<std::string>& names) {
  std::ostringstream os;
  os << label << ": " << to_string(v.mode) << " first integral " << (v.holds ? "HOLDS" : "FAILS") << "\n";
  for (const auto& r : v.residuals) os << "  residual " << r.name << " = " << to_string(r.residual, names) << "\n";
  return os.str();
}

inline std::string resonance_text(const ResonanceReport& r) {
  std::ostringstream os;
  os << "resonance analysis (K=" << r.bound << ", tol=" << format_double(r.tol) << ", lattice " << to_string(r.lattice)
     << ")\n";
  for (const auto& l : r.lattices) {
    os << "  " << l.label << ": eigenvalues";
    for (const auto& e : l.eigenvalues) os << " " << eigenvalue_text(e);
    os << "\n    resonances " << l.vectors.size() << ", rank " << l.rank << ", " << l.certificate << "\n";
  }
  os << "  s_min = " << r.s_min << (r.s_min_certified ? " (certified)" : " (bounded)") << "\n";
  os << "  (H1) " << to_string(r.h1.verdict) << ": " << r.h1.reason << "\n";
  for (const auto& v : r.verdicts) {
    os << "  " << to_string(v.kind) << " [" << v.question << "] via " << v.theorem << "; "
       << v.status.to_string();
    if (v.count_bound) os << "; bound " << *v.count_bound;
    os << "\n    " << v.detail << "\n    hypotheses:";
    for (const auto& h : v.hypotheses) os << " [" << h.name << ": " << (h.holds ? "yes" : "no") << "]";
    os << "\n";
    if (!v.resonances.empty()) {
      os << "    resonances:";
      for (std::size_t i = 0; i < v.resonances.size() && i < 10; ++i) os << " " << vector_text(v.resonances[i]);
      if (v.resonances.size() > 10) os << " ... (" << v.resonances.size() << " total)";
      os << "\n";
    }
  }
  return os.str();
}

inline std::string basis_text(const IntegralBasis& b, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << to_string(b.mode) << " first integrals on degree window [" << b.dmin << ", " << b.dmax << "] ("
     << b.monomial_count << " monomials): ";
  if (b.basis.empty()) {
    os << "none\n";
    return os.str();
  }
  os << b.basis.size() << " basis element(s), independence rank " << b.independence_rank << "\n";
  for (const auto& p : b.basis) os << "  " << to_string(p, names) << "\n";
  return os.str();
}

inline std::string conservation_text(const std::string& label, const ConservationReport& r) {
  std::ostringstream os;
  os << label << ": " << to_string(r.mode) << " conservation " << (r.inconclusive ? "INCONCLUSIVE" : r.pass ? "PASS" : "FAIL")
     << "\n  Phi(x0) = " << format_complex(r.phi0) << ", mean = " << format_complex(r.mean)
     << ", stderr = " << format_double(r.std_error) << ", delta = " << format_double(r.delta)
     << ", max_dev = " << format_double(r.max_dev) << "\n  threshold " << format_double(r.threshold) << " ("
     << (r.mode == IntegralMode::weak ? "3*stderr + C_bias*h, C_bias = " : "C_path*sqrt(h), C_path = ")
     << format_double(r.constant) << "); paths used " << r.n_used << ", excluded " << r.n_excluded << ", exited "
     << r.n_exited << "\n  stopping times: " << r.stopping << "\n";
  return os.str();
}

}  // namespace sdefi
