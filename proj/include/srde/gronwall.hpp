#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace srde {

/// Nonnegative rate functions tabulated on a uniform time grid over [0, t_end];
/// integrals are trapezoid sums on this grid, so bounds are reproducible
/// bit-for-bit from the tabulation.
struct RateTable {
  double t_end = 0.0;
  Eigen::ArrayXd c1;
  Eigen::ArrayXd c2;

  static RateTable constant(double c1_value, double c2_value, double t_end, int points = 2);
  void validate() const;
};

/// Bound for the log-growth comparison x(t) <= c0 + int c1 x + int c2 x log_+ x,
/// valid for c0 >= 1:
///   c0^{exp(int c2)} * exp( exp(int c2) * int_0^t c1(s) exp(-int_0^s c2) ds ).
double log_plus_bound(double c0, const RateTable& rates, double t);

/// Bound for the reciprocal-log comparison
/// x(t) <= c0 + int c1 x + int c2 x log_+(1/x), valid for c0 >= 0:
///   (c0 + c0^{exp(-int c2)}) * exp(int (c1 + c2)),
/// with 0^p = 0 so c0 = 0 yields 0.
double log_reciprocal_bound(double c0, const RateTable& rates, double t);

enum class GronwallLemma { LogGrowth, ReciprocalLog };

struct OdeCertification {
  double ode_value = 0.0;        // RK4 solution of the saturated comparison ODE
  double bound_value = 0.0;      // closed-form bound at the same time
  double refinement_delta = 0.0; // change under step halving
  bool ode_blew_up = false;
  bool dominated = false;        // bound >= ode * (1 - 1e-6)
};

/// Integrates the saturated worst-case ODE with RK4 and checks that the
/// closed-form bound dominates it:
///   LogGrowth:      y' = c1 y + c2 y log_+ y,                y(0) = c0 >= 1
///   ReciprocalLog:  y' = (c1 + c2) y + c2 y log_+(1/y),      y(0) = c0 >= 0
OdeCertification certify_against_ode(GronwallLemma lemma, double c0, const RateTable& rates,
                                     double t, int steps);

}  // namespace srde
