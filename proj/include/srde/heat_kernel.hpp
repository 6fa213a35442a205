#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "srde/grid.hpp"

namespace srde {

/// Gaussian transition density p_t(x,y) = (2 pi t)^{-1/2} exp(-(x-y)^2 / (2t)).
double kernel_value(double t, double x, double y);

/// Heat semigroup on the periodic grid, applied in Fourier space: mode m is
/// damped by exp(-k_m^2 t / 2) with k_m = pi m / L. This is the exact periodic
/// convolution with the wrapped kernel, so the circular-convolution error is
/// only the kernel tail mass tracked by GridSpec.
class Semigroup {
public:
  explicit Semigroup(const GridSpec& grid);

  /// P_t f. t = 0 returns f unchanged; t < 0 is a domain error.
  Field apply(const Field& f, double t) const;

  /// Spectral second derivative on the periodic grid.
  Field laplacian(const Field& f) const;

  /// In-place variant with a cached multiplier for a fixed step (hot path).
  class Stepper {
  public:
    Stepper(const Semigroup& sg, double dt);
    void apply_inplace(Field& f) const;

  private:
    const Semigroup* sg_;
    Eigen::ArrayXd multiplier_;
  };

  Stepper stepper(double dt) const { return Stepper(*this, dt); }
  const GridSpec& grid() const { return grid_; }
  const Eigen::ArrayXd& mode_wavenumbers() const { return k_; }

private:
  friend class Stepper;
  GridSpec grid_;
  Eigen::ArrayXd k_;  // wavenumber of each half-spectrum mode

  void forward(const Field& f, Eigen::ArrayXcd& spec) const;
  void inverse(const Eigen::ArrayXcd& spec, Field& f) const;
};

/// Convenience one-shot application.
Field semigroup_apply(const Field& f, double t, const GridSpec& grid);

/// One exponentially weighted kernel moment: the quadrature value of the
/// integral and the closed-form upper bound it must respect.
struct ExactBoundPair {
  double exact = 0.0;
  double bound = 0.0;
};

/// The three weighted kernel moments with weight e^{eta |y|}:
///   [0]: int p_t(x,y) e^{eta|y|} dy           <= 2 e^{eta^2 t/2} e^{eta|x|}
///   [1]: int p_t(x,y)^2 e^{eta|y|} dy         <= (pi t)^{-1/2} e^{eta^2 t/4} e^{eta|x|}
///   [2]: int p_t(x,y) e^{eta|y|} eta|y| dy    <= e^{eta^2 t/2}(e^{eta|x|} eta|x|
///                                                + 2(eta^2 t + eta sqrt(t/(2 pi))) e^{eta|x|})
/// The quadrature window is grown until the analytic tail estimate is below
/// the tolerance.
std::array<ExactBoundPair, 3> weighted_kernel_integrals(double t, double x, double eta,
                                                        double quad_tol = 1e-10);

struct InequalityStats {
  std::string inequality_id;
  long samples = 0;
  long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> worst_point;  // sampled parameters at the worst slack
};

struct KernelSuiteReport {
  std::vector<InequalityStats> inequalities;
  long total_violations() const {
    long n = 0;
    for (const auto& s : inequalities) n += s.violations;
    return n;
  }
};

/// Randomized certification of the eight kernel comparison estimates: left
/// sides by quadrature (or pointwise evaluation), right sides in closed form.
/// Sampling ranges: t,s in [1e-3, 5], |x|,|y| <= 10, eta in [0,2] (positive
/// where required), theta in [0,1]. Violations are counted, never thrown.
KernelSuiteReport kernel_inequality_suite(long samples, std::uint64_t seed);

}  // namespace srde
