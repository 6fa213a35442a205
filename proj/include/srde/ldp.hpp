#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srde/coefficients.hpp"
#include "srde/grid.hpp"
#include "srde/skeleton.hpp"

namespace srde {

/// Threshold event: the solution at the final time exceeds `a` at `x0`.
struct EventSpec {
  double x0 = 0.0;
  double a = 1.0;
};

struct ProbabilityEstimate {
  double p = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double effective_samples = 0.0;
  long samples = 0;
  bool tilted = false;
  bool reliable = true;  // false when the effective sample size drops below 10
};

/// Monte Carlo estimate of P(u^eps(T, x0) > a): plain when no tilt is given,
/// importance sampling under the controlled dynamics with the discrete
/// Girsanov weight exp(-sum h dW / sqrt(eps) - sum h^2 dt dx / (2 eps))
/// otherwise. The weight uses the same increments as the simulation, so the
/// discrete likelihood ratio is exact for the discretized model.
ProbabilityEstimate estimate_probability(const EventSpec& event, const CoefficientSet& coeffs,
                                         const Field& u0, double eps, long n_samples,
                                         const std::optional<ControlField>& tilt,
                                         const GridSpec& grid, std::uint64_t seed);

struct LdpCurveRow {
  double eps = 0.0;
  double p = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double eps_log_p = 0.0;
  double neg_rate = 0.0;  // -I for the event, from the rate minimization
  bool tilted = false;
  bool reliable = true;
};

struct LdpCurve {
  std::vector<LdpCurveRow> rows;
};

/// eps log P(event) along an eps grid, tilted below `plain_threshold` and
/// plain above, with the precomputed rate value as the reference column.
LdpCurve ldp_curve(const EventSpec& event, const CoefficientSet& coeffs, const Field& u0,
                   const std::vector<double>& eps_list, long n_samples,
                   const ControlField& tilt, double rate_value, const GridSpec& grid,
                   std::uint64_t seed, double plain_threshold = 0.2);

struct C1Row {
  int m = 0;
  double distance = 0.0;  // path metric between the perturbed and base solutions
};

struct C1Table {
  std::vector<C1Row> rows;
  double initial_distance = 0.0;
  double final_ratio = 0.0;  // last distance / first distance
  bool decreasing_to_zero = false;
};

/// Weak-continuity experiment: perturb the control by the weakly null family
/// sin(m x) g(x) and track the solution distance as m grows. The profile g is
/// a fixed centered bump of the given amplitude, so every h_m stays in a
/// common energy ball.
C1Table c1_experiment(const CoefficientSet& coeffs, const Field& u0, const ControlField& h,
                      const std::vector<int>& m_list, const GridSpec& grid,
                      double bump_amplitude = 0.5);

struct C2Row {
  double eps = 0.0;
  double mean_distance = 0.0;
  double exceed_frequency = 0.0;  // fraction of paths with distance > delta
};

struct C2Table {
  std::vector<C2Row> rows;
  double fitted_slope = 0.0;  // log-log slope of mean distance vs eps
};

/// Vanishing-noise experiment: distance between the controlled stochastic
/// solution and the deterministic skeleton at the same control, for each eps.
C2Table c2_experiment(const CoefficientSet& coeffs, const Field& u0, const ControlField& h,
                      const std::vector<double>& eps_list, int n_samples,
                      const GridSpec& grid, std::uint64_t seed, double delta = 0.05,
                      int metric_terms = 20);

}  // namespace srde
