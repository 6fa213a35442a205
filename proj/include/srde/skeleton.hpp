#pragma once

#include <cstdint>
#include <vector>

#include "srde/coefficients.hpp"
#include "srde/grid.hpp"
#include "srde/weights.hpp"

namespace srde {

/// Discretized control h in L^2([0,T] x R): row k acts on time cell
/// [t_k, t_{k+1}), columns follow the spatial nodes. The energy
/// (1/2) sum h^2 dt dx is cached at construction.
struct ControlField {
  Eigen::ArrayXXd values;
  double energy = 0.0;

  static ControlField make(Eigen::ArrayXXd values, const GridSpec& grid);
  static ControlField zero(const GridSpec& grid);
};

void require_control_shape(const ControlField& h, const GridSpec& grid, const char* what);

/// Int(h)(t,x) = int_0^t int_0^x h, with int_0^x = -int_x^0 for x < 0.
Trajectory int_map(const ControlField& h, const GridSpec& grid);

struct SkeletonOptions {
  double tol = 1e-8;
  int max_iter = 200;
  /// Convergence gaps are measured in the time-weighted sup at this lambda.
  double lambda = 1.0;
  /// Evaluate a log-Lipschitz drift directly instead of through its
  /// mollification; the caller asserts the drift is Lipschitz on the range the
  /// solution actually visits.
  bool assume_local_lipschitz = false;
};

struct SkeletonResult {
  Trajectory trajectory;
  int iterations = 0;
  double residual = 0.0;  // last Picard gap in the weighted sup
};

/// Picard iteration on the mild map
///   Y -> P_t u0 + int_0^t P_{t-s} [ b(Y) + sigma(Y) h ] ds,
/// discretized by the shared one-step recursion with eps = 0. Stops when
/// successive iterates differ by less than tol in the time-weighted sup.
SkeletonResult solve_skeleton_lipschitz(const CoefficientSet& coeffs, const Field& u0,
                                        const ControlField& h, const GridSpec& grid,
                                        const SkeletonOptions& opts = {});

struct MollifiedGapRow {
  int n_coarse = 0;
  int n_fine = 0;
  double gap = 0.0;  // weighted-sup distance between consecutive iterates
};

struct MollifiedResult {
  Trajectory trajectory;  // solution at the last mollification index
  std::vector<MollifiedGapRow> table;
  bool converged = false;
};

/// Approximation path for log-Lipschitz drifts: solve the Lipschitz problem
/// for each mollified pair (b_n, sigma_n) along n_schedule and track the
/// successive gaps; converged when the final gap is below tol.
MollifiedResult solve_skeleton_mollified(const CoefficientSet& coeffs, const Field& u0,
                                         const ControlField& h, const GridSpec& grid,
                                         const std::vector<int>& n_schedule = {8, 16, 32, 64,
                                                                               128},
                                         double tol = 1e-3,
                                         const SkeletonOptions& opts = {});

struct UniquenessReport {
  std::vector<double> disagreements;  // vs. the reference solve, per initialization
  double max_disagreement = 0.0;
  double tolerance = 0.0;  // 10 x solver tol
  bool passed = false;
};

/// Re-solves from perturbed Picard initializations (zero, heat flow of u0, and
/// random bounded fields) and checks that every fixed point coincides.
UniquenessReport uniqueness_probe(const CoefficientSet& coeffs, const Field& u0,
                                  const ControlField& h, const GridSpec& grid,
                                  int random_inits = 1, std::uint64_t seed = 7,
                                  const SkeletonOptions& opts = {});

struct UniformBoundReport {
  std::vector<int> n_schedule;
  std::vector<double> weighted_sups;  // per-n time-weighted sup of the solution
  double max_weighted_sup = 0.0;
  double control_term_time_exponent = 0.0;   // fitted Holder exponent in t
  double control_term_space_exponent = 0.0;  // fitted Holder exponent in x
};

/// Weighted-sup boundedness of the mollified family plus equicontinuity
/// diagnostics of the control convolution term on a central window.
UniformBoundReport uniform_bound_diagnostic(const CoefficientSet& coeffs, const Field& u0,
                                            const ControlField& h, const GridSpec& grid,
                                            double lambda,
                                            const std::vector<int>& n_schedule = {8, 16, 32,
                                                                                  64, 128});

}  // namespace srde
