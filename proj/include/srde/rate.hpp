#pragma once

#include <cstdint>
#include <vector>

#include "srde/coefficients.hpp"
#include "srde/grid.hpp"
#include "srde/skeleton.hpp"

namespace srde {

/// Control energy (1/2) int int h^2 dt dx on the grid.
double energy(const ControlField& h, const GridSpec& grid);

struct InversionResult {
  ControlField control;
  double residual = 0.0;  // tempered sup distance between the re-solved path and f
};

/// Recovers the control that drives a given trajectory:
///   h = (d_t f - (1/2) Lap f - b(f)) / sigma(f)
/// by time-centered differences with the spectral Laplacian, then closes the
/// loop by re-solving and reporting the distance. Requires |sigma| >= sigma_min
/// along the trajectory and f(0) = u0.
InversionResult invert_control(const Trajectory& f, const CoefficientSet& coeffs,
                               const Field& u0, const GridSpec& grid,
                               double sigma_min = 1e-6, double init_tol = 1e-8);

struct EndpointConstraint {
  double x0 = 0.0;  // observation point
  double a = 1.0;   // target value of Y(T, x0)
};

struct OptimizerConfig {
  double mu0 = 10.0;            // initial penalty weight
  double mu_factor = 10.0;      // growth per outer round
  int rounds = 5;
  int max_inner_iterations = 600;
  double constraint_tol = 1e-3; // stop growing mu once |Y(T,x0) - a| is below
  double grad_tol = 1e-9;       // inner stop on the sup norm of the gradient
  double armijo_c = 1e-4;
  int restarts = 1;
  std::uint64_t restart_seed = 11;
};

struct OptimizerHistoryRow {
  double mu = 0.0;
  int inner_iterations = 0;
  double objective = 0.0;
  double energy = 0.0;
  double endpoint_gap = 0.0;
};

struct RateResult {
  ControlField control;
  double rate = 0.0;            // energy of the minimizing control
  double endpoint_value = 0.0;  // Y^h(T, x0) at the optimum
  double endpoint_gap = 0.0;
  std::vector<OptimizerHistoryRow> history;
  bool converged = false;
};

/// Endpoint-constrained control energy minimization by quadratic penalty with
/// gradients from the exact discrete adjoint of the one-step recursion.
/// Throws NonConvergenceError with the best iterate's gap when the constraint
/// cannot be met.
RateResult minimize_rate_endpoint(const CoefficientSet& coeffs, const Field& u0,
                                  const EndpointConstraint& constraint, const GridSpec& grid,
                                  const OptimizerConfig& opt = {});

struct GradCheckRow {
  double adjoint_derivative = 0.0;
  double fd_derivative = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckRow> probes;
  double max_rel_error = 0.0;
};

/// Central finite differences against the adjoint gradient on random
/// directions. mu = 0 checks the energy term alone (gradient is h itself).
GradCheckReport finite_difference_gradient_check(const ControlField& h,
                                                 const CoefficientSet& coeffs,
                                                 const Field& u0,
                                                 const EndpointConstraint& constraint,
                                                 const GridSpec& grid, double mu, int probes,
                                                 std::uint64_t seed = 23);

}  // namespace srde
