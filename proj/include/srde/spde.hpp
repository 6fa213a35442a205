#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srde/coefficients.hpp"
#include "srde/grid.hpp"
#include "srde/weights.hpp"

namespace srde {

/// One run of the driven/controlled reaction-diffusion recursion
///   u_{k+1} = P_dt( u_k + dt b(u_k) + dt sigma(u_k) h_k
///                   + sqrt(eps) sigma(u_k) dW_k / dx ).
/// The same recursion serves the noise-driven equation (control absent), the
/// controlled equation, and the deterministic skeleton (eps = 0), so paired
/// experiments share their discretization error.
struct SolveConfig {
  CoefficientSet coeffs;
  Field u0;
  double eps = 0.0;
  std::optional<Eigen::ArrayXXd> control;  // n_t x n_x, row k acts on step k
  GridSpec grid;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  void validate() const;
};

struct SpdeResult {
  Trajectory trajectory;
  double weighted_sup = 0.0;  // time-weighted sup diagnostic at lambda = 1
};

SpdeResult solve_spde(const SolveConfig& cfg);

struct ExplosionRow {
  double window = 0.0;    // half-width of the sup window
  double mean_sup = 0.0;  // Monte Carlo mean of sup_{|x|<=window} |u(t,x)|
};

struct ExplosionTable {
  double time = 0.0;
  int samples = 0;
  std::vector<ExplosionRow> rows;
  double fitted_exponent = 0.0;  // p in mean_sup ~ A (log window)^p, windows >= 2
  bool strictly_increasing = false;
};

/// Windowed-sup growth of the driftless unit-noise field: the sup over
/// |x| <= window of |u(t, x)| grows like sqrt(log window), the desk-scale
/// shadow of the almost-sure explosion of the sup over all of R.
ExplosionTable explosion_demo(double t, const std::vector<double>& windows, int samples,
                              std::uint64_t seed, const GridSpec& grid);

}  // namespace srde
