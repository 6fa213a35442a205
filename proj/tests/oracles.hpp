#pragma once

// Reference values for the tests, computed along routes independent of the
// library's implementation paths: closed forms, brute-force convolution, and
// a plain Simpson integrator.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>

#include "srde/grid.hpp"

namespace oracles {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }
inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

inline double gauss_kernel(double t, double x, double y) {
  return std::exp(-(x - y) * (x - y) / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

/// int p_t(x,y) e^{eta |y|} dy by completing the square on each half line.
inline double weighted_mass(double t, double x, double eta) {
  const double rt = std::sqrt(t);
  return std::exp(0.5 * eta * eta * t) *
         (std::exp(eta * x) * normal_cdf((x + eta * t) / rt) +
          std::exp(-eta * x) * normal_cdf((eta * t - x) / rt));
}

/// int p_t(x,y)^2 e^{eta |y|} dy via p_t^2 = p_{t/2} / sqrt(4 pi t).
inline double weighted_square_mass(double t, double x, double eta) {
  return weighted_mass(0.5 * t, x, eta) / std::sqrt(4.0 * M_PI * t);
}

/// int p_t(0,y) e^{eta |y|} eta |y| dy at the origin.
inline double weighted_abs_moment_origin(double t, double eta) {
  const double rt = std::sqrt(t);
  return 2.0 * eta * std::exp(0.5 * eta * eta * t) *
         (eta * t * normal_cdf(eta * rt) + rt * normal_pdf(eta * rt));
}

/// int |p_t(x,z) - p_t(y,z)| dz in closed form.
inline double l1_kernel_difference(double t, double x, double y) {
  const double d = std::abs(x - y);
  return 2.0 * (2.0 * normal_cdf(d / (2.0 * std::sqrt(t))) - 1.0);
}

/// Composite Simpson on [a,b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// Brute-force periodic heat convolution: wrapped kernel times dx, O(n^2).
inline srde::Field brute_periodic_semigroup(const srde::Field& f, double t,
                                            const srde::GridSpec& grid, int images = 6) {
  const int n = grid.n_x;
  const double period = 2.0 * grid.half_width;
  srde::Field out = srde::Field::Zero(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      double k = 0.0;
      for (int m = -images; m <= images; ++m)
        k += gauss_kernel(t, grid.x(i), grid.x(j) + m * period);
      acc += k * f[j];
    }
    out[i] = acc * grid.dx();
  }
  return out;
}

/// (P_tau [sin(m .) g])(x) for the Gaussian bump g(y) = amp exp(-y^2/(2 w^2)),
/// by a complex completion of the square.
inline double heat_of_oscillatory_bump(double tau, double x, double m, double w, double amp) {
  if (tau <= 0.0) return amp * std::exp(-0.5 * x * x / (w * w)) * std::sin(m * x);
  const std::complex<double> im(0.0, 1.0);
  const double alpha = 1.0 / tau + 1.0 / (w * w);
  const std::complex<double> beta = x / tau + im * m;
  const std::complex<double> val =
      std::exp(beta * beta / (2.0 * alpha) - x * x / (2.0 * tau)) / std::sqrt(tau * alpha);
  return amp * val.imag();
}

/// Mean of |N(0, v)| (folded normal with variance v).
inline double folded_normal_mean(double v) { return std::sqrt(2.0 * v / M_PI); }

/// Variance of the one-step-smoothed white-noise accumulation at (T, x0) for
/// the discrete scheme, from wrapped-kernel rows:
///   sum_{k=1..n_t} sum_i p_wrap(k dt, x0 - x_i)^2 dt dx.
inline double discrete_endpoint_variance(const srde::GridSpec& g, double x0,
                                         int images = 4) {
  const double period = 2.0 * g.half_width;
  double var = 0.0;
  for (int k = 1; k <= g.n_t; ++k) {
    const double tau = k * g.dt();
    for (int i = 0; i < g.n_x; ++i) {
      double kernel = 0.0;
      for (int m = -images; m <= images; ++m)
        kernel += gauss_kernel(tau, x0, g.x(i) + m * period);
      var += kernel * kernel * g.dt() * g.dx();
    }
  }
  return var;
}

}  // namespace oracles
