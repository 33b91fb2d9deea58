#pragma once

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdefi/report.hpp"

namespace sdefi::cli {

enum ExitCode : int { ok = 0, input_error = 2, numeric_error = 3 };

struct Output {
  std::string format = "text";
  bool json() const { return format == "json"; }
};

struct SimFlags {
  std::size_t paths = 1000;
  double step = 1e-3;
  double horizon = 1.0;
  double radius = 1e6;
  std::string center = "x0";
  std::optional<std::uint64_t> seed;
  std::string x0;
  std::string mode = "weak";
};

namespace detail {

inline std::vector<std::complex<double>> parse_point(const std::string& text, std::size_t n) {
  std::vector<std::complex<double>> x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find('/') != std::string::npos) {
      x.emplace_back(parse_rational(item).get_d(), 0.0);
      continue;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      x.emplace_back(v, 0.0);
    } catch (const std::logic_error&) {
      throw InputError("cannot parse initial point entry '" + item + "'");
    }
  }
  if (x.size() != n) throw DimensionError("--x0 has " + std::to_string(x.size()) + " entries, dimension is " + std::to_string(n));
  return x;
}

inline IntegralMode parse_mode(const std::string& m) {
  if (m == "weak") return IntegralMode::weak;
  if (m == "strong") return IntegralMode::strong;
  throw InputError("mode must be 'weak' or 'strong'");
}

// Candidates from the command line override those stored in the file.
inline std::vector<std::pair<std::string, LaurentPoly>> collect_candidates(const SystemFile& sf,
                                                                           const std::vector<std::string>& flags) {
  std::vector<std::pair<std::string, LaurentPoly>> out;
  for (const auto& c : flags) out.emplace_back(c, parse_candidate(c, sf.system.var_names));
  if (out.empty())
    for (const auto& [name, p] : sf.candidates) out.emplace_back(name, p);
  return out;
}

inline SimConfig make_sim_config(const SystemFile& sf, const SimFlags& f) {
  if (!f.seed) throw InputError("simulate requires --seed (no wall-clock default)");
  SimConfig cfg;
  cfg.x0 = f.x0.empty() ? sf.x0 : parse_point(f.x0, sf.system.dim());
  if (cfg.x0.empty()) throw InputError("no initial point: pass --x0 or put \"x0\" in the system file");
  cfg.h = f.step;
  cfg.horizon = f.horizon;
  cfg.paths = f.paths;
  cfg.radius = f.radius;
  if (f.center == "origin") cfg.center = ExitCenter::origin;
  else if (f.center == "x0") cfg.center = ExitCenter::initial_point;
  else throw InputError("--center must be 'x0' or 'origin'");
  cfg.seed = *f.seed;
  cfg.validate(sf.system.dim());
  return cfg;
}

inline std::vector<IntegralMode> sim_modes(const std::string& m) {
  if (m == "both") return {IntegralMode::weak, IntegralMode::strong};
  return {parse_mode(m)};
}

inline void add_sim_flags(CLI::App* app, SimFlags& f) {
  app->add_option("--paths", f.paths, "number of sample paths")->check(CLI::PositiveNumber);
  app->add_option("--step", f.step, "Euler-Maruyama step h")->check(CLI::PositiveNumber);
  app->add_option("--horizon", f.horizon, "time horizon T")->check(CLI::PositiveNumber);
  app->add_option("--radius", f.radius, "exit radius R of the stopping ball")->check(CLI::PositiveNumber);
  app->add_option("--center", f.center, "centre of the stopping ball: x0 or origin");
  app->add_option("--seed", f.seed, "64-bit RNG seed");
  app->add_option("--x0", f.x0, "initial point, comma separated");
  app->add_option("--sim-mode", f.mode, "weak, strong or both");
}

struct SimulationResult {
  json j;
  std::string text;
};

inline SimulationResult run_simulation(const SystemFile& sf, const SimFlags& flags,
                                       const std::vector<std::pair<std::string, LaurentPoly>>& cands) {
  const SimConfig cfg = make_sim_config(sf, flags);
  const SimEnsemble ens = simulate_paths(sf.system, cfg);
  SimulationResult r;
  r.j["config"] = sim_config_json(cfg);
  r.j["paths_exited"] = ens.n_exited;
  r.j["paths_pole"] = ens.n_pole;
  r.j["paths_overflow"] = ens.n_overflow;
  r.j["tests"] = json::array();
  std::ostringstream os;
  os << "simulation: " << cfg.paths << " paths, h = " << format_double(cfg.h) << ", T = " << format_double(cfg.horizon)
     << ", R = " << format_double(cfg.radius) << ", seed " << cfg.seed << "; exited " << ens.n_exited << ", poles "
     << ens.n_pole << ", overflow " << ens.n_overflow << "\n";
  for (const auto& [name, phi] : cands) {
    for (IntegralMode m : sim_modes(flags.mode)) {
      const ConservationReport rep = conservation_test(ens, phi, m);
      json t = conservation_json(rep, cfg);
      t["candidate"] = name;
      t["phi"] = to_string(phi, sf.system.var_names);
      r.j["tests"].push_back(t);
      os << conservation_text(name, rep);
    }
  }
  r.text = os.str();
  return r;
}

}  // namespace detail

/// Runs one command. args excludes the program name. Returns the exit code.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strong and weak first integrals of polynomial stochastic differential equations"};
  app.require_subcommand(1);
  Output output;
  std::string system_path;
  std::vector<std::string> candidates;
  std::string mode = "weak";
  int dmin = 1, dmax = 3;
  int kbound = 10;
  double tol = 1e-9;
  std::string lattice = "zplus";
  double u = 0.37;
  int lbound = 8, degree = 4;
  std::uint64_t perturb_seed = 1;
  SimFlags sim;
  bool with_sim = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("system", system_path, "system file (JSON)")->required();
    sub->add_option("--output", output.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  };
  auto* check_strong_cmd = app.add_subcommand("check-strong", "test candidates as strong first integrals");
  auto* check_weak_cmd = app.add_subcommand("check-weak", "test candidates as weak first integrals");
  for (auto* sub : {check_strong_cmd, check_weak_cmd}) {
    add_common(sub);
    sub->add_option("--candidate", candidates, "polynomial text or a file; repeatable");
  }
  auto* search_cmd = app.add_subcommand("search", "exact basis of first integrals on a degree window");
  add_common(search_cmd);
  search_cmd->add_option("--mode", mode, "weak or strong")->check(CLI::IsMember({"weak", "strong"}));
  search_cmd->add_option("--dmin", dmin, "lowest total degree");
  search_cmd->add_option("--dmax", dmax, "highest total degree");

  auto* resonance_cmd = app.add_subcommand("resonance", "linearize at the origin and apply the resonance criteria");
  auto* analyze_cmd = app.add_subcommand("analyze", "candidates, resonance analysis and bounded search in one report");
  for (auto* sub : {resonance_cmd, analyze_cmd}) {
    add_common(sub);
    sub->add_option("--kbound", kbound, "resonance enumeration bound K on |k|_1")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "tolerance for non-exact eigenvalues")->check(CLI::PositiveNumber);
    sub->add_option("--lattice", lattice, "zplus or z")->check(CLI::IsMember({"zplus", "z"}));
  }
  analyze_cmd->add_option("--candidate", candidates, "polynomial text or a file; repeatable");
  analyze_cmd->add_option("--dmin", dmin, "lowest total degree for the bounded search");
  analyze_cmd->add_option("--dmax", dmax, "highest total degree for the bounded search");
  analyze_cmd->add_flag("--simulate", with_sim, "add a Monte Carlo cross-check of the candidates");
  detail::add_sim_flags(analyze_cmd, sim);

  auto* perturb_cmd = app.add_subcommand("perturb", "build and verify a linear noise that destroys weak integrals");
  add_common(perturb_cmd);
  perturb_cmd->add_option("--u", u, "base value in (0,1)");
  perturb_cmd->add_option("--lbound", lbound, "residual scan bound L")->check(CLI::PositiveNumber);
  perturb_cmd->add_option("--degree", degree, "verification degree D")->check(CLI::PositiveNumber);
  perturb_cmd->add_option("--seed", perturb_seed, "seed of the retry sequence for u");

  auto* simulate_cmd = app.add_subcommand("simulate", "Euler-Maruyama Monte Carlo conservation test");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--candidate", candidates, "polynomial text or a file; repeatable");
  detail::add_sim_flags(simulate_cmd, sim);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  try {
    const SystemFile sf = parse_system(system_path);
    const SdeSystem& sys = sf.system;
    const auto& names = sys.var_names;
    json report;
    std::ostringstream text;
    report["system"] = system_path;

    if (check_strong_cmd->parsed() || check_weak_cmd->parsed()) {
      const IntegralMode m = check_strong_cmd->parsed() ? IntegralMode::strong : IntegralMode::weak;
      const auto cands = detail::collect_candidates(sf, candidates);
      if (cands.empty()) throw InputError("no candidate: pass --candidate or list candidates in the system file");
      report["command"] = m == IntegralMode::strong ? "check-strong" : "check-weak";
      report["results"] = json::array();
      for (const auto& [name, phi] : cands) {
        const IntegralVerdict v = check(m, sys, phi);
        json r = integral_verdict_json(v, names);
        r["candidate"] = name;
        r["phi"] = to_string(phi, names);
        report["results"].push_back(r);
        text << integral_verdict_text(name + " = " + to_string(phi, names), v, names);
      }
    } else if (search_cmd->parsed()) {
      const IntegralBasis b = find_first_integrals(sys, detail::parse_mode(mode), dmin, dmax);
      report["command"] = "search";
      report["result"] = basis_json(b, names);
      text << basis_text(b, names);
    } else if (resonance_cmd->parsed()) {
      ResonanceOptions opt;
      opt.bound = kbound;
      opt.tol = tol;
      opt.lattice = lattice == "z" ? Lattice::z : Lattice::zplus;
      const SpectralData sd = linearization(sys, opt.roots);
      const ResonanceReport rr = nonintegrability_report(sys, opt);
      report["command"] = "resonance";
      report["linearization"] = spectral_json(sd);
      report["resonance"] = resonance_json(rr);
      text << resonance_text(rr);
    } else if (analyze_cmd->parsed()) {
      report["command"] = "analyze";
      const auto cands = detail::collect_candidates(sf, candidates);
      report["candidates"] = json::array();
      for (const auto& [name, phi] : cands) {
        json c{{"candidate", name}, {"phi", to_string(phi, names)}};
        text << "candidate " << name << " = " << to_string(phi, names) << "\n";
        for (IntegralMode m : {IntegralMode::strong, IntegralMode::weak}) {
          try {
            const IntegralVerdict v = check(m, sys, phi);
            c[to_string(m)] = integral_verdict_json(v, names);
            text << "  " << integral_verdict_text(to_string(m), v, names);
          } catch (const InputError& e) {
            c[to_string(m)] = {{"error", e.what()}};
            text << "  " << to_string(m) << ": not checked (" << e.what() << ")\n";
          }
        }
        report["candidates"].push_back(c);
      }
      std::optional<ResonanceReport> rr;
      try {
        ResonanceOptions opt;
        opt.bound = kbound;
        opt.tol = tol;
        opt.lattice = lattice == "z" ? Lattice::z : Lattice::zplus;
        const SpectralData sd = linearization(sys, opt.roots);
        rr = nonintegrability_report(sys, opt);
        report["linearization"] = spectral_json(sd);
        report["resonance"] = resonance_json(*rr);
        text << resonance_text(*rr);
      } catch (const PreconditionError& e) {
        report["resonance"] = {{"applicable", false}, {"reason", e.what()}};
        text << "resonance analysis not applicable: " << e.what() << "\n";
      }
      report["search"] = json::array();
      for (IntegralMode m : {IntegralMode::weak, IntegralMode::strong}) {
        const IntegralBasis b = find_first_integrals(sys, m, dmin, dmax);
        json bj = basis_json(b, names);
        text << basis_text(b, names);
        if (m == IntegralMode::strong && rr) {
          const CountBoundCheck cb = count_bound_check(b, *rr);
          bj["count_bound_check"] = {{"rank", cb.rank},
                                     {"s_min", cb.s_min},
                                     {"consistent", cb.consistent},
                                     {"report_certified", cb.report_certified},
                                     {"note", cb.note}};
          text << "  count bound: " << cb.note << "\n";
        }
        report["search"].push_back(bj);
      }
      if (with_sim) {
        const auto sr = detail::run_simulation(sf, sim, cands);
        report["simulation"] = sr.j;
        text << sr.text;
      }
    } else if (perturb_cmd->parsed()) {
      PerturbationOptions po;
      po.seed = perturb_seed;
      const PerturbationPlan plan = build_perturbation(sys.drift, u, lbound, po);
      const PerturbationVerdict v = verify_perturbation(sys.drift, plan, degree);
      report["command"] = "perturb";
      report["plan"] = plan_json(plan);
      json ce = json::array();
      for (const auto& p : v.counterexamples) ce.push_back(poly_json(p, names));
      report["verification"] = {{"result", v.pass ? "PASS" : "FAIL"},
                                {"degree_window", {1, v.degree}},
                                {"counterexamples", ce},
                                {"scope", v.note}};
      text << "perturbation: u = " << format_double(plan.u) << " after " << plan.attempts << " attempt(s), exponents";
      for (auto a : plan.exponents) text << " " << a;
      text << ", residual scan to |l|_1 <= " << plan.verified_to << " (min relative |residual| "
           << format_double(plan.residual_min) << ")\n  P =\n";
      for (Eigen::Index i = 0; i < plan.p_numeric.rows(); ++i) {
        text << "   ";
        for (Eigen::Index j = 0; j < plan.p_numeric.cols(); ++j) text << " " << format_complex(plan.p_numeric(i, j));
        text << "\n";
      }
      text << "verification on degrees 1.." << v.degree << ": " << (v.pass ? "PASS" : "FAIL") << "\n";
      for (const auto& p : v.counterexamples) text << "  counterexample " << to_string(p, names) << "\n";
      text << "  scope: " << v.note << "\n";
    } else if (simulate_cmd->parsed()) {
      report["command"] = "simulate";
      const auto sr = detail::run_simulation(sf, sim, detail::collect_candidates(sf, candidates));
      report["simulation"] = sr.j;
      text << sr.text;
    }

    if (output.json()) out << report.dump(2) << "\n";
    else out << text.str();
    return ok;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const PoleError& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return numeric_error;
  } catch (const std::exception& e) {
    err << "internal failure: " << e.what() << "\n";
    return numeric_error;
  }
}

}  // namespace sdefi::cli
