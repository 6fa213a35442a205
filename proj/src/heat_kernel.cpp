#include "srde/heat_kernel.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <limits>
#include <mutex>

#include "srde/parallel.hpp"
#include "srde/quadrature.hpp"
#include "srde/rng.hpp"

namespace srde {

double kernel_value(double t, double x, double y) {
  if (!(t > 0.0)) throw std::domain_error("kernel_value: t must be positive");
  const double d = x - y;
  return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

// ---------------------------------------------------------------------------
// Spectral semigroup
// ---------------------------------------------------------------------------

namespace {

// One FFT engine per thread; Eigen's FFT caches plans per length internally.
Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return f;
  }();
  return fft;
}

}  // namespace

Semigroup::Semigroup(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  const int n_modes = grid_.n_x / 2 + 1;
  k_.resize(n_modes);
  for (int m = 0; m < n_modes; ++m) k_[m] = M_PI * m / grid_.half_width;
}

void Semigroup::forward(const Field& f, Eigen::ArrayXcd& spec) const {
  Eigen::VectorXcd out;
  Eigen::VectorXd in = f.matrix();
  thread_fft().fwd(out, in);
  spec = out.array();
}

void Semigroup::inverse(const Eigen::ArrayXcd& spec, Field& f) const {
  Eigen::VectorXd out;
  Eigen::VectorXcd in = spec.matrix();
  thread_fft().inv(out, in, grid_.n_x);
  f = out.array();
}

Field Semigroup::apply(const Field& f, double t) const {
  require_field_shape(f, grid_, "semigroup_apply");
  if (t < 0.0) throw std::domain_error("semigroup_apply: t must be nonnegative");
  if (t == 0.0) return f;
  Eigen::ArrayXcd spec;
  forward(f, spec);
  spec *= (-0.5 * t * k_.square()).exp();
  Field out;
  inverse(spec, out);
  return out;
}

Field Semigroup::laplacian(const Field& f) const {
  require_field_shape(f, grid_, "laplacian");
  Eigen::ArrayXcd spec;
  forward(f, spec);
  spec *= -k_.square();
  Field out;
  inverse(spec, out);
  return out;
}

Semigroup::Stepper::Stepper(const Semigroup& sg, double dt) : sg_(&sg) {
  if (dt < 0.0) throw std::domain_error("semigroup stepper: dt must be nonnegative");
  multiplier_ = (-0.5 * dt * sg.k_.square()).exp();
}

void Semigroup::Stepper::apply_inplace(Field& f) const {
  Eigen::ArrayXcd spec;
  sg_->forward(f, spec);
  spec *= multiplier_;
  sg_->inverse(spec, f);
}

Field semigroup_apply(const Field& f, double t, const GridSpec& grid) {
  return Semigroup(grid).apply(f, t);
}

// ---------------------------------------------------------------------------
// Weighted kernel moments and the comparison suite
// ---------------------------------------------------------------------------

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// int_c^inf p_t(x,y) e^{eta y} dy.
double tail_exp(double t, double x, double c, double eta) {
  const double mu = x + eta * t;
  return std::exp(eta * x + 0.5 * eta * eta * t) * normal_sf((c - mu) / std::sqrt(t));
}

// int_c^inf p_t(x,y) e^{eta y} |eta y| dy upper estimate (valid for c >= 0, eta >= 0).
double tail_exp_moment(double t, double x, double c, double eta) {
  const double mu = x + eta * t;
  const double z = (c - mu) / std::sqrt(t);
  const double first = std::abs(mu) * normal_sf(z) + std::sqrt(t) * normal_pdf(z);
  return eta * std::exp(eta * x + 0.5 * eta * eta * t) * first;
}

// Symmetric quadrature window [lo, hi] that covers x (and optionally y) with
// all exponentially weighted tails below tol.
void weighted_window(double t, double x, double eta, double tol, double& lo, double& hi) {
  double w = 12.0 * std::sqrt(t) + std::abs(eta) * t + 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    hi = std::max(x, 0.0) + w;
    lo = std::min(x, 0.0) - w;
    // right tail of p_t(x,.) e^{eta|y|}, and the mirrored left tail
    double tail = tail_exp(t, x, hi, std::abs(eta)) + tail_exp(t, -x, -lo, std::abs(eta));
    double tail_m = tail_exp_moment(t, x, hi, std::abs(eta)) +
                    tail_exp_moment(t, -x, -lo, std::abs(eta));
    if (tail + tail_m < tol) return;
    w *= 1.5;
  }
  throw NumericalError("weighted kernel integral: tail window did not close");
}

double integral_weight(double t, double x, double eta, double tol) {
  double lo, hi;
  weighted_window(t, x, eta, 0.25 * tol, lo, hi);
  auto f = [&](double y) { return kernel_value(t, x, y) * std::exp(eta * std::abs(y)); };
  return integrate_split(f, lo, hi, {0.0}, tol);
}

double integral_sq_weight(double t, double x, double eta, double tol) {
  double lo, hi;
  weighted_window(0.5 * t, x, eta, 0.25 * tol * std::sqrt(4.0 * M_PI * t), lo, hi);
  auto f = [&](double y) {
    double p = kernel_value(t, x, y);
    return p * p * std::exp(eta * std::abs(y));
  };
  return integrate_split(f, lo, hi, {0.0}, tol);
}

double integral_weight_moment(double t, double x, double eta, double tol) {
  double lo, hi;
  weighted_window(t, x, eta, 0.25 * tol, lo, hi);
  auto f = [&](double y) {
    return kernel_value(t, x, y) * std::exp(eta * std::abs(y)) * eta * std::abs(y);
  };
  return integrate_split(f, lo, hi, {0.0}, tol);
}

double integral_absdiff_weight(double t, double x, double y, double eta, double eta_moment,
                               double tol) {
  double lo1, hi1, lo2, hi2;
  weighted_window(t, x, eta, 0.125 * tol, lo1, hi1);
  weighted_window(t, y, eta, 0.125 * tol, lo2, hi2);
  const double lo = std::min(lo1, lo2), hi = std::max(hi1, hi2);
  auto f = [&](double z) {
    double base = std::abs(kernel_value(t, x, z) - kernel_value(t, y, z));
    if (eta != 0.0) base *= std::exp(eta * std::abs(z));
    if (eta_moment != 0.0) base *= eta_moment * std::abs(z);
    return base;
  };
  // the difference changes sign at the midpoint; the weight has a kink at 0
  return integrate_split(f, lo, hi, {0.0, 0.5 * (x + y)}, tol);
}

// int_0^s int (p_{t-r}(x,z) - p_{s-r}(y,z))^2 dz dr with the inner integral in
// closed form and the substitution r = s - u^2 removing the endpoint
// singularity.
double integral_sq_diff_spacetime(double t, double s, double x, double y, double tol) {
  const double dts = t - s;
  auto f = [&](double u) {
    const double a = dts + u * u;
    double val = u / std::sqrt(M_PI * a) + 1.0 / std::sqrt(M_PI);
    const double tau = dts + 2.0 * u * u;
    if (tau > 0.0)
      val -= 4.0 * u * kernel_value(tau, x, y);
    return val;
  };
  return integrate_or_throw(f, 0.0, std::sqrt(s), tol);
}

}  // namespace

std::array<ExactBoundPair, 3> weighted_kernel_integrals(double t, double x, double eta,
                                                        double quad_tol) {
  if (!(t > 0.0)) throw std::domain_error("weighted_kernel_integrals: t must be positive");
  if (eta < 0.0) throw std::domain_error("weighted_kernel_integrals: eta must be >= 0");
  const double ax = std::abs(x);
  // The tolerance turns relative once the weighted integral outgrows 1;
  // an absolute 1e-10 target is not representable at magnitudes ~e^{30}.
  std::array<ExactBoundPair, 3> out;
  out[0].bound = 2.0 * std::exp(0.5 * eta * eta * t) * std::exp(eta * ax);
  out[0].exact = integral_weight(t, x, eta, quad_tol * std::max(1.0, out[0].bound));
  out[1].bound = std::exp(0.25 * eta * eta * t) * std::exp(eta * ax) / std::sqrt(M_PI * t);
  out[1].exact = integral_sq_weight(t, x, eta, quad_tol * std::max(1.0, out[1].bound));
  if (eta > 0.0) {
    out[2].bound = std::exp(0.5 * eta * eta * t) *
                   (std::exp(eta * ax) * eta * ax +
                    2.0 * (eta * eta * t + eta * std::sqrt(t / (2.0 * M_PI))) *
                        std::exp(eta * ax));
    out[2].exact = integral_weight_moment(t, x, eta, quad_tol * std::max(1.0, out[2].bound));
  }
  return out;
}

namespace {

struct SamplePoint {
  double t = 0, s = 0, x = 0, y = 0, eta = 0, theta = 0;
  std::vector<double> as_vector() const { return {t, s, x, y, eta, theta}; }
};

SamplePoint draw_point(std::uint64_t seed, int ineq, long i) {
  CounterRng rng(seed, static_cast<std::uint64_t>(ineq), static_cast<std::uint64_t>(i));
  SamplePoint p;
  double t1 = rng.uniform(1e-3, 5.0);
  double t2 = rng.uniform(1e-3, 5.0);
  p.s = std::min(t1, t2);
  p.t = std::max(t1, t2);
  p.x = rng.uniform(-10.0, 10.0);
  p.y = rng.uniform(-10.0, 10.0);
  p.eta = rng.uniform(0.0, 2.0);
  p.theta = rng.uniform(0.0, 1.0);
  return p;
}

// slack = bound - lhs for one draw of inequality `ineq` (ids 1..8).
double evaluate_slack(int ineq, const SamplePoint& p, double& bound_scale) {
  constexpr double kQuadTol = 1e-10;
  const double t = p.t, s = p.s, x = p.x, y = p.y, theta = p.theta;
  const double eta = (ineq == 3 || ineq == 6 || ineq == 7) ? std::max(p.eta, 1e-3) : p.eta;
  double lhs = 0.0, rhs = 0.0;
  switch (ineq) {
    case 1: {
      auto r = weighted_kernel_integrals(t, x, eta, kQuadTol);
      lhs = r[0].exact;
      rhs = r[0].bound;
      break;
    }
    case 2: {
      auto r = weighted_kernel_integrals(t, x, eta, kQuadTol);
      lhs = r[1].exact;
      rhs = r[1].bound;
      break;
    }
    case 3: {
      auto r = weighted_kernel_integrals(t, x, eta, kQuadTol);
      lhs = r[2].exact;
      rhs = r[2].bound;
      break;
    }
    case 4: {
      lhs = std::abs(kernel_value(t, x, y) - kernel_value(s, x, y));
      rhs = std::pow(2.0 * std::sqrt(2.0) * (t - s) / s, theta) *
            (kernel_value(s, x, y) + kernel_value(t, x, y) + kernel_value(2.0 * t, x, y));
      break;
    }
    case 5: {
      rhs = std::sqrt(2.0 / M_PI) * std::abs(x - y) / std::sqrt(t);
      lhs = integral_absdiff_weight(t, x, y, 0.0, 0.0, kQuadTol);
      break;
    }
    case 6: {
      rhs = 2.0 * std::sqrt(2.0) * std::abs(x - y) / std::sqrt(t) * std::exp(eta * eta * t) *
            std::exp(eta * (std::abs(x) + std::abs(x - y)));
      lhs = integral_absdiff_weight(t, x, y, eta, 0.0, kQuadTol * std::max(1.0, rhs));
      break;
    }
    case 7: {
      const double reach = std::abs(x) + std::abs(x - y);
      rhs = std::sqrt(2.0) * std::abs(x - y) / std::sqrt(t) *
            (std::exp(eta * eta * t) * std::exp(eta * reach) * eta * reach +
             2.0 * std::exp(eta * eta * t) *
                 (2.0 * eta * eta * t + eta * std::sqrt(t / M_PI)) * std::exp(eta * reach));
      lhs = integral_absdiff_weight(t, x, y, eta, eta, kQuadTol * std::max(1.0, rhs));
      break;
    }
    case 8: {
      lhs = integral_sq_diff_spacetime(t, s, x, y, kQuadTol);
      rhs = (std::sqrt(2.0) - 1.0) / std::sqrt(M_PI) * std::sqrt(t - s) +
            2.0 / std::sqrt(M_PI) * std::abs(x - y);
      break;
    }
    default:
      throw std::logic_error("unknown inequality id");
  }
  bound_scale = std::max(1.0, std::abs(rhs));
  return rhs - lhs;
}

}  // namespace

KernelSuiteReport kernel_inequality_suite(long samples, std::uint64_t seed) {
  if (samples <= 0) throw std::domain_error("kernel_inequality_suite: samples must be > 0");
  KernelSuiteReport report;
  static const char* kIds[8] = {"exp_weight_moment",    "squared_kernel_moment",
                                "exp_weight_abs_moment", "time_difference_pointwise",
                                "space_difference_l1",   "space_difference_weighted",
                                "space_difference_weighted_moment", "squared_spacetime_difference"};
  report.inequalities.resize(8);

  const int shards = std::min(worker_count() * 4, 64);
  struct ShardStats {
    long violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    long worst_idx = -1;
  };

  for (int ineq = 1; ineq <= 8; ++ineq) {
    std::vector<ShardStats> stats(shards);
    parallel_for(shards, [&](int shard) {
      ShardStats local;
      for (long i = shard; i < samples; i += shards) {
        SamplePoint p = draw_point(seed, ineq, i);
        double scale = 1.0;
        double slack = evaluate_slack(ineq, p, scale);
        if (slack < -1e-9 * scale) ++local.violations;
        if (slack < local.worst || (slack == local.worst && i < local.worst_idx)) {
          local.worst = slack;
          local.worst_idx = i;
        }
      }
      stats[shard] = local;
    });
    InequalityStats& out = report.inequalities[ineq - 1];
    out.inequality_id = kIds[ineq - 1];
    out.samples = samples;
    ShardStats best;
    for (const auto& s : stats) {
      out.violations += s.violations;
      if (s.worst < best.worst || (s.worst == best.worst && s.worst_idx < best.worst_idx)) {
        best.worst = s.worst;
        best.worst_idx = s.worst_idx;
      }
    }
    out.worst_slack = best.worst;
    if (best.worst_idx >= 0)
      out.worst_point = draw_point(seed, ineq, best.worst_idx).as_vector();
  }
  return report;
}

}  // namespace srde
