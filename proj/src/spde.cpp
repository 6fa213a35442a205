#include "srde/spde.hpp"

#include <cmath>

#include "srde/errors.hpp"
#include "srde/heat_kernel.hpp"
#include "srde/noise.hpp"
#include "srde/parallel.hpp"
#include "srde/weights.hpp"

namespace srde {

void SolveConfig::validate() const {
  grid.validate();
  require_field_shape(u0, grid, "solve_spde");
  if (eps < 0.0) throw std::domain_error("solve_spde: eps must be nonnegative");
  if (control &&
      (control->rows() != grid.n_t || control->cols() != grid.n_x))
    throw ShapeError("solve_spde: control shape does not match grid");
}

namespace {

// Explicit stepping is only trusted while dt * Lip(b) < 1/2 on the range the
// trajectory has visited.
void check_drift_stiffness(const CoefficientSet& coeffs, double dt, double lo, double hi,
                           const char* what) {
  const double lip = empirical_lipschitz(coeffs.b, lo - 0.5, hi + 0.5);
  if (dt * lip >= 0.5)
    throw std::domain_error(std::string(what) +
                            ": dt * Lip(b) = " + std::to_string(dt * lip) +
                            " on the observed range, refine the time grid");
}

}  // namespace

SpdeResult solve_spde(const SolveConfig& cfg) {
  cfg.validate();
  const GridSpec& grid = cfg.grid;
  const double dt = grid.dt();
  const double sqrt_eps = std::sqrt(cfg.eps);
  const double inv_dx = 1.0 / grid.dx();

  Semigroup sg(grid);
  auto step = sg.stepper(dt);

  SpdeResult out;
  out.trajectory.resize(grid.n_t + 1, grid.n_x);
  out.trajectory.row(0) = cfg.u0.transpose();

  Field state = cfg.u0;
  Field sigma_u(grid.n_x), noise_row_buf;
  double range_lo = cfg.u0.minCoeff(), range_hi = cfg.u0.maxCoeff();
  if (cfg.coeffs.regime == Regime::Lipschitz)
    check_drift_stiffness(cfg.coeffs, dt, range_lo, range_hi, "solve_spde");
  for (int k = 0; k < grid.n_t; ++k) {
    sigma_u = apply_fn(cfg.coeffs.sigma, state);
    Field incr = state + dt * apply_fn(cfg.coeffs.b, state);
    if (cfg.control) incr += dt * sigma_u * cfg.control->row(k).transpose();
    if (cfg.eps > 0.0) {
      noise_row(grid, cfg.seed, cfg.stream, k, noise_row_buf);
      incr += sqrt_eps * inv_dx * sigma_u * noise_row_buf;
    }
    step.apply_inplace(incr);
    state = incr;
    for (int i = 0; i < grid.n_x; ++i) {
      if (!std::isfinite(state[i]))
        throw BlowUpError("solve_spde: trajectory left the finite range", grid.t(k + 1),
                          grid.x(i));
    }
    range_lo = std::min(range_lo, state.minCoeff());
    range_hi = std::max(range_hi, state.maxCoeff());
    if (cfg.coeffs.regime == Regime::Lipschitz && (k % 128 == 127 || k + 1 == grid.n_t))
      check_drift_stiffness(cfg.coeffs, dt, range_lo, range_hi, "solve_spde");
    out.trajectory.row(k + 1) = state.transpose();
  }

  const double kappa =
      cfg.coeffs.constants.count("c1") ? cfg.coeffs.constant("c1") : 0.0;
  out.weighted_sup =
      time_weighted_sup(out.trajectory, WeightParams::make(kappa, 1.0), grid);
  return out;
}

ExplosionTable explosion_demo(double t, const std::vector<double>& windows, int samples,
                              std::uint64_t seed, const GridSpec& grid) {
  if (samples <= 0) throw std::domain_error("explosion_demo: samples must be > 0");
  if (windows.empty()) throw std::domain_error("explosion_demo: need at least one window");
  for (std::size_t i = 0; i + 1 < windows.size(); ++i)
    if (!(windows[i] < windows[i + 1]))
      throw std::domain_error("explosion_demo: windows must be strictly increasing");
  if (windows.back() > grid.half_width)
    throw std::domain_error("explosion_demo: largest window exceeds the grid");
  GridSpec demo_grid = grid;
  demo_grid.T = t;

  // per-sample window sups, merged in sample order
  Eigen::ArrayXXd sups(samples, static_cast<int>(windows.size()));
  parallel_for(samples, [&](int s) {
    SolveConfig cfg;
    cfg.coeffs = builtin("zero_drift_unit_sigma");
    cfg.u0 = Field::Zero(demo_grid.n_x);
    cfg.eps = 1.0;
    cfg.grid = demo_grid;
    cfg.seed = seed;
    cfg.stream = static_cast<std::uint64_t>(s);
    const Trajectory traj = solve_spde(cfg).trajectory;
    for (std::size_t w = 0; w < windows.size(); ++w) {
      double m = 0.0;
      for (int i = 0; i < demo_grid.n_x; ++i)
        if (std::abs(demo_grid.x(i)) <= windows[w])
          m = std::max(m, std::abs(traj(demo_grid.n_t, i)));
      sups(s, static_cast<int>(w)) = m;
    }
  });

  ExplosionTable table;
  table.time = t;
  table.samples = samples;
  for (std::size_t w = 0; w < windows.size(); ++w)
    table.rows.push_back({windows[w], sups.col(static_cast<int>(w)).mean()});

  table.strictly_increasing = true;
  for (std::size_t w = 0; w + 1 < table.rows.size(); ++w)
    if (!(table.rows[w].mean_sup < table.rows[w + 1].mean_sup))
      table.strictly_increasing = false;

  // least squares for p in log E = log A + p log log(window), over windows >= 2
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : table.rows) {
    if (row.window < 2.0 || row.mean_sup <= 0.0) continue;
    const double x = std::log(std::log(row.window));
    const double y = std::log(row.mean_sup);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2) table.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return table;
}

}  // namespace srde
