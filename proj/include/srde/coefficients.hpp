#pragma once

#include <cstdint>
#include <limits>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "srde/grid.hpp"

namespace srde {

using ScalarFn = std::function<double(double)>;

enum class Regime { Lipschitz, LogLipschitz };

/// Drift/diffusion pair with regime metadata and the constants used by the
/// hypothesis checks. Derivatives are carried for adjoint computations.
struct CoefficientSet {
  std::string name;
  ScalarFn b;
  ScalarFn sigma;
  ScalarFn db;      // d b / du
  ScalarFn dsigma;  // d sigma / du
  Regime regime = Regime::Lipschitz;
  std::map<std::string, double> constants;

  double constant(const std::string& key) const {
    auto it = constants.find(key);
    if (it == constants.end())
      throw std::out_of_range("coefficient set '" + name + "' has no constant '" + key + "'");
    return it->second;
  }
};

/// b_n(x) = eta_n(x) * n * int b(y) phi(n(x-y)) dy with phi the normalized
/// bump exp(-1/(1-u^2)) on (-1,1) and eta_n a smoothstep cutoff equal to 1 on
/// [-n, n] and 0 outside [-(n+2), n+2]. The same operation mollifies sigma.
ScalarFn mollify(const ScalarFn& f, int n);

/// Smooth cutoff eta_n itself (exposed for tests).
double mollifier_cutoff(double x, int n);

/// Lipschitz approximation (b_n, sigma_n) of an H1 set, wrapped as an H0 set
/// with an empirically estimated Lipschitz constant.
CoefficientSet mollify_set(const CoefficientSet& coeffs, int n);

struct ViolationReport {
  long samples = 0;
  long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> worst_point;
};

/// |b(u)| <= c1 |u| log_+|u| + c2 over randomized u (log-uniform up to 1e3
/// plus a fine mesh near 0 and 1).
ViolationReport verify_h1_growth(const ScalarFn& b, double c1, double c2, long samples,
                                 std::uint64_t seed);

/// |b(u)-b(v)| <= c3 |u-v| log_+(1/|u-v|) + c4 log_+(|u| v |v|) |u-v| + c5 |u-v|.
ViolationReport verify_h1_log_lipschitz(const ScalarFn& b, double c3, double c4, double c5,
                                        long sample_pairs, std::uint64_t seed);

/// |b(u)-b(v)| + |sigma(u)-sigma(v)| <= L |u-v| on sampled pairs.
ViolationReport verify_h0_lipschitz(const CoefficientSet& coeffs, long sample_pairs,
                                    std::uint64_t seed);

struct MollifiedBoundsReport {
  std::vector<int> n_list;
  std::vector<double> fitted_growth_constant;  // per-n fit of L_b in the drift bound
  double frozen_growth_constant = 0.0;
  ViolationReport drift_bound;      // |b_n(x)| <= c1 |x| log_+|x| + L_b (|x|+1)
  ViolationReport diffusion_bound;  // |sigma_n(x)| <= K_sigma
};

/// Fits L_b on a dense grid, freezes it, then checks the mollified drift and
/// diffusion bounds uniformly over n_list on randomized samples.
MollifiedBoundsReport verify_mollified_bounds(const CoefficientSet& coeffs,
                                              const std::vector<int>& n_list, long samples,
                                              std::uint64_t seed);

/// Catalog: zero_drift_unit_sigma, linear, lipschitz_tanh, ulogu_bounded_sigma.
CoefficientSet builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Elementwise application of a scalar function.
inline Field apply_fn(const ScalarFn& fn, const Field& u) {
  Field out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = fn(u[i]);
  return out;
}

/// Largest difference quotient of f over a probe grid on [lo, hi]; the
/// explicit-stepping stability guards use this on the range a trajectory
/// actually visits.
inline double empirical_lipschitz(const ScalarFn& f, double lo, double hi, int probes = 64) {
  if (!(hi > lo)) return 0.0;
  const double h = (hi - lo) / probes;
  double worst = 0.0, prev = f(lo);
  for (int i = 1; i <= probes; ++i) {
    const double cur = f(lo + i * h);
    worst = std::max(worst, std::abs(cur - prev) / h);
    prev = cur;
  }
  return worst;
}

}  // namespace srde
