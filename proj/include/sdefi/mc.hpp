#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sdefi/ito.hpp"
#include "sdefi/parallel.hpp"

namespace sdefi {

/// Floating-point copy of a LaurentPoly for fast repeated evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const LaurentPoly& p) : dim_(p.dim()) {
    for (const auto& [e, c] : p.terms()) terms_.push_back({c.to_complex(), e});
  }

  /// Returns false on a pole (negative power of an exact zero).
  bool eval(std::span<const std::complex<double>> x, std::complex<double>& out) const {
    out = 0.0;
    for (const auto& t : terms_) {
      std::complex<double> v = t.coeff;
      for (std::size_t j = 0; j < dim_; ++j) {
        int k = t.exps[j];
        if (k == 0) continue;
        if (k < 0) {
          if (x[j] == 0.0) return false;
          v /= ipow(x[j], -k);
        } else {
          v *= ipow(x[j], k);
        }
      }
      out += v;
    }
    return true;
  }

 private:
  struct Term {
    std::complex<double> coeff;
    ExpVec exps;
  };
  static std::complex<double> ipow(std::complex<double> b, int k) {
    std::complex<double> r = 1.0;
    while (k) {
      if (k & 1) r *= b;
      b *= b;
      k >>= 1;
    }
    return r;
  }
  std::size_t dim_ = 0;
  std::vector<Term> terms_;
};

enum class ExitCenter { initial_point, origin };

struct SimConfig {
  std::vector<std::complex<double>> x0;
  double h = 1e-3;
  double horizon = 1.0;
  std::size_t paths = 1000;
  double radius = 1e6;
  ExitCenter center = ExitCenter::initial_point;
  std::uint64_t seed = 0;

  void validate(std::size_t dim) const {
    if (x0.size() != dim) throw DimensionError("x0 has " + std::to_string(x0.size()) + " entries, system dimension is " + std::to_string(dim));
    if (!(h > 0.0)) throw InputError("step size h must be positive");
    if (!(horizon >= h)) throw InputError("horizon T must be at least h");
    if (paths < 1) throw InputError("path count must be at least 1");
    if (!(radius > 0.0)) throw InputError("exit radius must be positive");
  }
  std::size_t steps() const { return static_cast<std::size_t>(std::llround(horizon / h)); }
};

enum class PathStatus { completed, exited, pole, overflow };

inline const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::completed: return "completed";
    case PathStatus::exited: return "exited";
    case PathStatus::pole: return "pole";
    default: return "overflow";
  }
}

struct PathResult {
  std::vector<std::complex<double>> state;  // X at T, or frozen at exit
  PathStatus status = PathStatus::completed;
  double stop_time = 0.0;
  std::uint64_t stream = 0;
};

struct SimEnsemble {
  SimConfig config;
  std::vector<PathResult> paths;
  std::size_t n_exited = 0;
  std::size_t n_pole = 0;
  std::size_t n_overflow = 0;
};

/// SplitMix64 finalizer; used to derive one independent stream per path.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t path_stream(std::uint64_t seed, std::uint64_t path) { return splitmix64(seed ^ splitmix64(path)); }

/// Euler-Maruyama, stopped at T or at the first exit from the ball.
inline SimEnsemble simulate_paths(const SdeSystem& sys, const SimConfig& cfg) {
  const std::size_t n = sys.dim();
  const std::size_t m = sys.noise_dim();
  cfg.validate(n);
  std::vector<CompiledPoly> f;
  for (const auto& c : sys.drift.comps) f.emplace_back(c);
  std::vector<std::vector<CompiledPoly>> g(m);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& c : sys.diffusions[i].comps) g[i].emplace_back(c);
  std::vector<std::complex<double>> center(n, 0.0);
  if (cfg.center == ExitCenter::initial_point) center = cfg.x0;

  const std::size_t steps = cfg.steps();
  const double sqh = std::sqrt(cfg.h);
  SimEnsemble ens;
  ens.config = cfg;
  ens.paths.resize(cfg.paths);
  parallel_for(cfg.paths, [&](std::size_t p) {
    PathResult& out = ens.paths[p];
    out.stream = path_stream(cfg.seed, p);
    std::mt19937_64 rng(out.stream);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> x = cfg.x0, next(n);
    std::vector<double> xi(m);
    out.status = PathStatus::completed;
    out.stop_time = static_cast<double>(steps) * cfg.h;
    for (std::size_t k = 0; k < steps; ++k) {
      for (auto& z : xi) z = normal(rng);
      bool ok = true;
      for (std::size_t j = 0; j < n && ok; ++j) {
        std::complex<double> v;
        ok = f[j].eval(x, v);
        next[j] = x[j] + v * cfg.h;
      }
      for (std::size_t i = 0; i < m && ok; ++i) {
        for (std::size_t j = 0; j < n && ok; ++j) {
          std::complex<double> v;
          ok = g[i][j].eval(x, v);
          next[j] += v * (sqh * xi[i]);
        }
      }
      if (!ok) {
        out.status = PathStatus::pole;
        out.stop_time = static_cast<double>(k) * cfg.h;
        break;
      }
      x.swap(next);
      double dist2 = 0.0;
      bool finite = true;
      for (std::size_t j = 0; j < n; ++j) {
        finite = finite && std::isfinite(x[j].real()) && std::isfinite(x[j].imag());
        dist2 += std::norm(x[j] - center[j]);
      }
      if (!finite) {
        out.status = PathStatus::overflow;
        out.stop_time = static_cast<double>(k + 1) * cfg.h;
        break;
      }
      if (dist2 > cfg.radius * cfg.radius) {
        out.status = PathStatus::exited;
        out.stop_time = static_cast<double>(k + 1) * cfg.h;
        break;
      }
    }
    out.state = std::move(x);
  });
  for (const auto& p : ens.paths) {
    ens.n_exited += p.status == PathStatus::exited;
    ens.n_pole += p.status == PathStatus::pole;
    ens.n_overflow += p.status == PathStatus::overflow;
  }
  return ens;
}

/// Sum in a fixed binary-tree order, so the result does not depend on threads.
inline std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) {
  if (v.size() <= 8) {
    std::complex<double> s = 0.0;
    for (const auto& z : v) s += z;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct ConservationOptions {
  std::optional<double> c_bias;  // weak mode; default 10 |Phi(x0)|
  std::optional<double> c_path;  // strong mode; default 10 |Phi(x0)| + 1
};

struct ConservationReport {
  IntegralMode mode = IntegralMode::weak;
  std::complex<double> phi0;
  std::complex<double> mean;
  double std_error = 0.0;
  double delta = 0.0;    // |mean - Phi(x0)|
  double max_dev = 0.0;  // max |Phi(X) - Phi(x0)|
  double threshold = 0.0;
  double constant = 0.0;  // C_bias or C_path actually used
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;
  std::size_t n_exited = 0;
  bool inconclusive = false;
  bool pass = false;
  std::string stopping;  // which stopping times were exercised
};

inline ConservationReport conservation_test(const SimEnsemble& ens, const LaurentPoly& phi, IntegralMode mode,
                                            const ConservationOptions& opt = {}) {
  const SimConfig& cfg = ens.config;
  if (phi.dim() != cfg.x0.size()) throw DimensionError("candidate dimension does not match the ensemble");
  const CompiledPoly cp(phi);
  ConservationReport r;
  r.mode = mode;
  r.n_exited = ens.n_exited;
  r.stopping = "tau = T and the first exit time from the ball of radius " + std::to_string(cfg.radius) + " around " +
               (cfg.center == ExitCenter::origin ? "the origin" : "x0");
  if (!cp.eval(cfg.x0, r.phi0)) throw InputError("candidate has a pole at x0");

  std::vector<std::complex<double>> values;
  values.reserve(ens.paths.size());
  for (const auto& p : ens.paths) {
    std::complex<double> v;
    if (p.status == PathStatus::pole || p.status == PathStatus::overflow || !cp.eval(p.state, v) ||
        !std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      ++r.n_excluded;
      continue;
    }
    values.push_back(v);
  }
  r.n_used = values.size();
  if (values.empty()) {
    r.inconclusive = true;
    return r;
  }
  const double nn = static_cast<double>(values.size());
  r.mean = pairwise_sum(values) / nn;
  std::vector<std::complex<double>> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    sq[i] = std::norm(values[i] - r.mean);
    r.max_dev = std::max(r.max_dev, std::abs(values[i] - r.phi0));
  }
  const double var = values.size() > 1 ? pairwise_sum(sq).real() / (nn - 1.0) : 0.0;
  r.std_error = std::sqrt(var / nn);
  r.delta = std::abs(r.mean - r.phi0);
  if (mode == IntegralMode::weak) {
    r.constant = opt.c_bias.value_or(10.0 * std::abs(r.phi0));
    r.threshold = 3.0 * r.std_error + r.constant * cfg.h;
    r.pass = r.delta <= r.threshold;
  } else {
    r.constant = opt.c_path.value_or(10.0 * std::abs(r.phi0) + 1.0);
    r.threshold = r.constant * std::sqrt(cfg.h);
    r.pass = r.max_dev <= r.threshold;
  }
  return r;
}

}  // namespace sdefi
