#include "srde/ldp.hpp"

#include <cmath>

#include "srde/errors.hpp"
#include "srde/heat_kernel.hpp"
#include "srde/noise.hpp"
#include "srde/parallel.hpp"
#include "srde/rng.hpp"
#include "srde/weights.hpp"

namespace srde {

namespace {

int nearest_node(const GridSpec& grid, double x0) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n_x; ++i) {
    const double d = std::abs(grid.x(i) - x0);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// One driven/controlled path, returning the endpoint value and (when tilting)
// the noise score sum h dW accumulated over the very increments consumed.
double simulate_endpoint(const CoefficientSet& coeffs, const Field& u0, double eps,
                         const Eigen::ArrayXXd* control, const GridSpec& grid,
                         std::uint64_t seed, std::uint64_t stream, int endpoint_index,
                         const Semigroup::Stepper& step, double* noise_score) {
  const double dt = grid.dt();
  const double sqrt_eps = std::sqrt(eps);
  const double inv_dx = 1.0 / grid.dx();
  Field state = u0, noise_buf;
  double score = 0.0;
  for (int k = 0; k < grid.n_t; ++k) {
    const Field sigma_u = apply_fn(coeffs.sigma, state);
    Field incr = state + dt * apply_fn(coeffs.b, state);
    if (control) incr += dt * sigma_u * control->row(k).transpose();
    if (eps > 0.0) {
      noise_row(grid, seed, stream, k, noise_buf);
      incr += sqrt_eps * inv_dx * sigma_u * noise_buf;
      if (control && noise_score)
        score += (control->row(k).transpose() * noise_buf).sum();
    }
    step.apply_inplace(incr);
    state = incr;
  }
  if (noise_score) *noise_score = score;
  for (int i = 0; i < grid.n_x; ++i)
    if (!std::isfinite(state[i]))
      throw BlowUpError("estimate_probability: trajectory left the finite range", grid.T,
                        grid.x(i));
  return state[endpoint_index];
}

}  // namespace

ProbabilityEstimate estimate_probability(const EventSpec& event, const CoefficientSet& coeffs,
                                         const Field& u0, double eps, long n_samples,
                                         const std::optional<ControlField>& tilt,
                                         const GridSpec& grid, std::uint64_t seed) {
  if (n_samples < 100)
    throw std::domain_error("estimate_probability: need at least 100 samples");
  grid.validate();
  require_field_shape(u0, grid, "estimate_probability");
  if (tilt) require_control_shape(*tilt, grid, "estimate_probability");
  const int endpoint_index = nearest_node(grid, event.x0);
  const Semigroup sg(grid);
  const auto step = sg.stepper(grid.dt());

  const bool tilted = tilt.has_value() && eps > 0.0;
  const double log_weight_const = tilted ? -tilt->energy / eps : 0.0;

  std::vector<double> values(n_samples), weights(n_samples, 1.0);
  parallel_for(static_cast<int>(n_samples), [&](int s) {
    double score = 0.0;
    const double endpoint = simulate_endpoint(
        coeffs, u0, eps, tilted ? &tilt->values : nullptr, grid, seed,
        static_cast<std::uint64_t>(s), endpoint_index, step, tilted ? &score : nullptr);
    const bool hit = endpoint > event.a;
    if (tilted) {
      const double w = std::exp(-score / std::sqrt(eps) + log_weight_const);
      weights[s] = w;
      values[s] = hit ? w : 0.0;
    } else {
      values[s] = hit ? 1.0 : 0.0;
    }
  });

  ProbabilityEstimate out;
  out.samples = n_samples;
  out.tilted = tilted;
  double sum = 0.0, sum_sq = 0.0, wsum = 0.0, wsum_sq = 0.0;
  for (long s = 0; s < n_samples; ++s) {
    sum += values[s];
    sum_sq += values[s] * values[s];
    wsum += weights[s];
    wsum_sq += weights[s] * weights[s];
  }
  out.p = sum / n_samples;
  const double var = std::max(0.0, sum_sq / n_samples - out.p * out.p);
  const double half = 1.96 * std::sqrt(var / n_samples);
  out.ci_low = out.p - half;
  out.ci_high = out.p + half;
  out.effective_samples = tilted && wsum_sq > 0.0
                              ? wsum * wsum / wsum_sq
                              : static_cast<double>(n_samples);
  out.reliable = out.effective_samples >= 10.0;
  return out;
}

LdpCurve ldp_curve(const EventSpec& event, const CoefficientSet& coeffs, const Field& u0,
                   const std::vector<double>& eps_list, long n_samples,
                   const ControlField& tilt, double rate_value, const GridSpec& grid,
                   std::uint64_t seed, double plain_threshold) {
  LdpCurve curve;
  for (double eps : eps_list) {
    const bool use_tilt = eps < plain_threshold;
    const auto est = estimate_probability(
        event, coeffs, u0, eps, n_samples,
        use_tilt ? std::optional<ControlField>(tilt) : std::nullopt, grid,
        seed + static_cast<std::uint64_t>(curve.rows.size()) * 0x10000);
    LdpCurveRow row;
    row.eps = eps;
    row.p = est.p;
    row.ci_low = est.ci_low;
    row.ci_high = est.ci_high;
    row.eps_log_p = est.p > 0.0 ? eps * std::log(est.p) : -std::numeric_limits<double>::infinity();
    row.neg_rate = -rate_value;
    row.tilted = est.tilted;
    row.reliable = est.reliable;
    curve.rows.push_back(row);
  }
  return curve;
}

C1Table c1_experiment(const CoefficientSet& coeffs, const Field& u0, const ControlField& h,
                      const std::vector<int>& m_list, const GridSpec& grid,
                      double bump_amplitude) {
  if (m_list.empty()) throw std::domain_error("c1_experiment: m_list must be nonempty");
  grid.validate();
  SkeletonOptions opts;
  opts.assume_local_lipschitz = true;

  const Trajectory base = solve_skeleton_lipschitz(coeffs, u0, h, grid, opts).trajectory;

  Field bump(grid.n_x);
  for (int i = 0; i < grid.n_x; ++i)
    bump[i] = bump_amplitude * std::exp(-0.5 * grid.x(i) * grid.x(i));

  C1Table table;
  for (int m : m_list) {
    Eigen::ArrayXXd values = h.values;
    for (int k = 0; k < grid.n_t; ++k)
      for (int i = 0; i < grid.n_x; ++i)
        values(k, i) += std::sin(m * grid.x(i)) * bump[i];
    const ControlField hm = ControlField::make(std::move(values), grid);
    const Trajectory perturbed = solve_skeleton_lipschitz(coeffs, u0, hm, grid, opts).trajectory;
    table.rows.push_back({m, path_metric(perturbed, base, 20, grid).value});
  }

  table.initial_distance = table.rows.front().distance;
  table.decreasing_to_zero = true;
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
    if (table.rows[i + 1].distance > table.rows[i].distance) table.decreasing_to_zero = false;
  table.final_ratio = table.initial_distance > 0.0
                          ? table.rows.back().distance / table.initial_distance
                          : 0.0;
  if (table.final_ratio >= 0.05) table.decreasing_to_zero = false;
  return table;
}

C2Table c2_experiment(const CoefficientSet& coeffs, const Field& u0, const ControlField& h,
                      const std::vector<double>& eps_list, int n_samples,
                      const GridSpec& grid, std::uint64_t seed, double delta,
                      int metric_terms) {
  if (n_samples < 1) throw std::domain_error("c2_experiment: need at least one sample");
  grid.validate();
  SkeletonOptions opts;
  opts.assume_local_lipschitz = true;
  const Trajectory base = solve_skeleton_lipschitz(coeffs, u0, h, grid, opts).trajectory;

  const Semigroup sg(grid);
  const auto step = sg.stepper(grid.dt());
  const double dt = grid.dt();
  const double inv_dx = 1.0 / grid.dx();
  const TemperedMetric metric_fn(metric_terms, grid);

  C2Table table;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    const double eps = eps_list[e];
    const double sqrt_eps = std::sqrt(eps);
    std::vector<double> distances(n_samples);
    parallel_for(n_samples, [&](int s) {
      Field state = u0, noise_buf;
      double metric = 0.0;
      for (int k = 0; k < grid.n_t; ++k) {
        const Field sigma_u = apply_fn(coeffs.sigma, state);
        Field incr = state + dt * apply_fn(coeffs.b, state) +
                     dt * sigma_u * h.values.row(k).transpose();
        if (eps > 0.0) {
          noise_row(grid, seed + e * 0x100000, static_cast<std::uint64_t>(s), k, noise_buf);
          incr += sqrt_eps * inv_dx * sigma_u * noise_buf;
        }
        step.apply_inplace(incr);
        state = incr;
        metric = std::max(metric, metric_fn(state, base.row(k + 1).transpose()));
      }
      distances[s] = metric;
    });
    C2Row row;
    row.eps = eps;
    for (double d : distances) {
      row.mean_distance += d;
      if (d > delta) row.exceed_frequency += 1.0;
    }
    row.mean_distance /= n_samples;
    row.exceed_frequency /= n_samples;
    table.rows.push_back(row);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : table.rows) {
    if (row.eps <= 0.0 || row.mean_distance <= 0.0) continue;
    const double x = std::log(row.eps);
    const double y = std::log(row.mean_distance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2) table.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return table;
}

}  // namespace srde
