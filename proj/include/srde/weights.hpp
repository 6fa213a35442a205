#pragma once

#include <cmath>
#include <stdexcept>

#include "srde/grid.hpp"

namespace srde {

/// log_+(u) = log(max(u, 1)); log_+(0) = 0.
inline double log_plus(double u) { return u > 1.0 ? std::log(u) : 0.0; }

/// Weight growth rate beta(kappa, lambda) = max(lambda^2/2, 4 kappa).
inline double beta(double kappa, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("beta: lambda must be positive");
  if (kappa < 0.0) throw std::domain_error("beta: kappa must be nonnegative");
  return std::max(0.5 * lambda * lambda, 4.0 * kappa);
}

/// Horizon T*(kappa, lambda) below which the weighted drift contraction holds:
///   (kappa/beta) exp((lambda^2/(4 beta)) e^{2 beta T - 1}) <= 1/2  iff  T <= T*.
inline double t_star(double kappa, double lambda) {
  if (!(kappa > 0.0)) throw std::domain_error("t_star: kappa must be positive");
  const double b = beta(kappa, lambda);
  return (1.0 + std::log(4.0 * b / (lambda * lambda) * std::log(b / (2.0 * kappa)))) /
         (2.0 * b);
}

/// Parameters of the time-dependent weight e^{-lambda |x| e^{beta t}}.
struct WeightParams {
  double lambda = 1.0;
  double kappa = 1.0;
  double growth = 4.0;     // beta(kappa, lambda)
  double horizon = 0.0;    // T*(kappa, lambda)

  static WeightParams make(double kappa, double lambda) {
    WeightParams w;
    w.lambda = lambda;
    w.kappa = kappa;
    w.growth = beta(kappa, lambda);
    w.horizon = kappa > 0.0 ? t_star(kappa, lambda) : 0.0;
    return w;
  }
};

/// A norm value together with the truncation error committed by restricting
/// the sup over R to the grid window.
struct NormValue {
  double value = 0.0;
  double truncation_error = 0.0;
  operator double() const { return value; }
};

/// Tempered sup norm |f|_(-lambda) = sup_x |f(x)| e^{-lambda |x|}, evaluated as
/// a grid maximum; the weight caps the out-of-window contribution at
/// max|f| e^{-lambda L}.
inline NormValue tem_norm(const Field& f, double lambda, const GridSpec& grid) {
  if (!(lambda > 0.0)) throw std::domain_error("tem_norm: lambda must be positive");
  require_field_shape(f, grid, "tem_norm");
  NormValue out;
  double max_abs = 0.0;
  for (int i = 0; i < grid.n_x; ++i) {
    const double a = std::abs(f[i]);
    max_abs = std::max(max_abs, a);
    out.value = std::max(out.value, a * std::exp(-lambda * std::abs(grid.x(i))));
  }
  out.truncation_error = max_abs * std::exp(-lambda * grid.half_width);
  return out;
}

/// Series metric d(f,g) = sum_n 2^{-n} min(1, |f-g|_(-1/n)), truncated after
/// n_terms with truncation error <= 2^{-n_terms}.
inline NormValue tem_metric(const Field& f, const Field& g, int n_terms,
                            const GridSpec& grid) {
  if (n_terms < 1) throw std::domain_error("tem_metric: n_terms must be >= 1");
  require_field_shape(f, grid, "tem_metric");
  require_field_shape(g, grid, "tem_metric");
  const Field diff = (f - g).abs();
  NormValue out;
  double scale = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    scale *= 0.5;
    double norm = 0.0;
    const double lambda = 1.0 / n;
    for (int i = 0; i < grid.n_x; ++i)
      norm = std::max(norm, diff[i] * std::exp(-lambda * std::abs(grid.x(i))));
    out.value += scale * std::min(1.0, norm);
  }
  out.truncation_error = scale;
  return out;
}

/// Series metric evaluator with precomputed weights, for per-step use inside
/// solvers and Monte Carlo loops.
class TemperedMetric {
public:
  TemperedMetric(int n_terms, const GridSpec& grid) : weights_(n_terms, grid.n_x) {
    if (n_terms < 1) throw std::domain_error("TemperedMetric: n_terms must be >= 1");
    for (int n = 1; n <= n_terms; ++n)
      for (int i = 0; i < grid.n_x; ++i)
        weights_(n - 1, i) = std::exp(-std::abs(grid.x(i)) / n);
  }

  double operator()(const Field& f, const Field& g) const {
    const Field diff = (f - g).abs();
    double out = 0.0;
    double scale = 1.0;
    for (int n = 0; n < weights_.rows(); ++n) {
      scale *= 0.5;
      out += scale * std::min(1.0, (diff * weights_.row(n).transpose()).maxCoeff());
    }
    return out;
  }

private:
  Eigen::ArrayXXd weights_;
};

/// Path metric: sup over time of the tempered series metric.
inline NormValue path_metric(const Trajectory& F, const Trajectory& G, int n_terms,
                             const GridSpec& grid) {
  require_trajectory_shape(F, grid, "path_metric");
  require_trajectory_shape(G, grid, "path_metric");
  NormValue out;
  for (int k = 0; k <= grid.n_t; ++k) {
    NormValue step = tem_metric(F.row(k).transpose(), G.row(k).transpose(), n_terms, grid);
    out.value = std::max(out.value, step.value);
    out.truncation_error = step.truncation_error;
  }
  return out;
}

/// sup over the (t,x) grid of |F(t,x)| e^{-lambda |x| e^{beta t}}.
inline double time_weighted_sup(const Trajectory& F, const WeightParams& w,
                                const GridSpec& grid) {
  require_trajectory_shape(F, grid, "time_weighted_sup");
  double out = 0.0;
  for (int k = 0; k <= grid.n_t; ++k) {
    const double rate = w.lambda * std::exp(w.growth * grid.t(k));
    for (int i = 0; i < grid.n_x; ++i)
      out = std::max(out, std::abs(F(k, i)) * std::exp(-rate * std::abs(grid.x(i))));
  }
  return out;
}

/// Same weighted sup for the difference of two trajectories.
inline double time_weighted_sup_diff(const Trajectory& F, const Trajectory& G,
                                     const WeightParams& w, const GridSpec& grid) {
  require_trajectory_shape(F, grid, "time_weighted_sup");
  require_trajectory_shape(G, grid, "time_weighted_sup");
  double out = 0.0;
  for (int k = 0; k <= grid.n_t; ++k) {
    const double rate = w.lambda * std::exp(w.growth * grid.t(k));
    for (int i = 0; i < grid.n_x; ++i)
      out = std::max(out, std::abs(F(k, i) - G(k, i)) * std::exp(-rate * std::abs(grid.x(i))));
  }
  return out;
}

/// Precomputed weight factors e^{-lambda |x_i| e^{beta t_k}}, for solvers that
/// measure many weighted sups on one grid.
inline Eigen::ArrayXXd weight_table(const WeightParams& w, const GridSpec& grid) {
  Eigen::ArrayXXd table(grid.n_t + 1, grid.n_x);
  for (int k = 0; k <= grid.n_t; ++k) {
    const double rate = w.lambda * std::exp(w.growth * grid.t(k));
    for (int i = 0; i < grid.n_x; ++i)
      table(k, i) = std::exp(-rate * std::abs(grid.x(i)));
  }
  return table;
}

}  // namespace srde
