#include "srde/skeleton.hpp"

#include <cmath>

#include "srde/errors.hpp"
#include "srde/heat_kernel.hpp"
#include "srde/rng.hpp"

namespace srde {

ControlField ControlField::make(Eigen::ArrayXXd values, const GridSpec& grid) {
  if (values.rows() != grid.n_t || values.cols() != grid.n_x)
    throw ShapeError("control field: values shape does not match grid");
  ControlField h;
  h.values = std::move(values);
  h.energy = 0.5 * h.values.square().sum() * grid.dt() * grid.dx();
  return h;
}

ControlField ControlField::zero(const GridSpec& grid) {
  return make(Eigen::ArrayXXd::Zero(grid.n_t, grid.n_x), grid);
}

void require_control_shape(const ControlField& h, const GridSpec& grid, const char* what) {
  if (h.values.rows() != grid.n_t || h.values.cols() != grid.n_x)
    throw ShapeError(std::string(what) + ": control shape does not match grid");
}

Trajectory int_map(const ControlField& h, const GridSpec& grid) {
  require_control_shape(h, grid, "int_map");
  const double cell = grid.dt() * grid.dx();
  // index of the node at x = 0; nodes left of it contribute with negative sign
  const int origin = static_cast<int>(std::llround(grid.half_width / grid.dx()));
  Trajectory out(grid.n_t + 1, grid.n_x);
  out.row(0).setZero();
  Eigen::ArrayXd time_acc = Eigen::ArrayXd::Zero(grid.n_x);  // per-cell sums over time
  for (int k = 0; k < grid.n_t; ++k) {
    time_acc += h.values.row(k).transpose();
    double acc = 0.0;
    out(k + 1, origin) = 0.0;
    for (int i = origin; i < grid.n_x - 1; ++i) {
      acc += time_acc[i] * cell;
      out(k + 1, i + 1) = acc;
    }
    acc = 0.0;
    for (int i = origin - 1; i >= 0; --i) {
      acc -= time_acc[i] * cell;
      out(k + 1, i) = acc;
    }
  }
  return out;
}

namespace {

struct PicardWorkspace {
  Semigroup sg;
  Semigroup::Stepper step;
  Eigen::ArrayXXd weights;

  PicardWorkspace(const GridSpec& grid, const WeightParams& w)
      : sg(grid), step(sg.stepper(grid.dt())), weights(weight_table(w, grid)) {}
};

// One application of the discrete mild map: the linear part accumulates
// through the one-step recursion while drift and control are evaluated on the
// previous iterate.
Trajectory picard_map(const CoefficientSet& coeffs, const Field& u0, const ControlField& h,
                      const GridSpec& grid, const Trajectory& prev,
                      const PicardWorkspace& ws) {
  const double dt = grid.dt();
  Trajectory next(grid.n_t + 1, grid.n_x);
  next.row(0) = u0.transpose();
  Field state = u0;
  for (int k = 0; k < grid.n_t; ++k) {
    const Field prev_k = prev.row(k).transpose();
    Field incr = state + dt * apply_fn(coeffs.b, prev_k);
    incr += dt * apply_fn(coeffs.sigma, prev_k) * h.values.row(k).transpose();
    ws.step.apply_inplace(incr);
    state = incr;
    for (int i = 0; i < grid.n_x; ++i)
      if (!std::isfinite(state[i]))
        throw BlowUpError("skeleton solve: iterate left the finite range", grid.t(k + 1),
                          grid.x(i));
    next.row(k + 1) = state.transpose();
  }
  return next;
}

Trajectory heat_flow(const Field& u0, const GridSpec& grid, const PicardWorkspace& ws) {
  Trajectory out(grid.n_t + 1, grid.n_x);
  out.row(0) = u0.transpose();
  Field state = u0;
  for (int k = 0; k < grid.n_t; ++k) {
    ws.step.apply_inplace(state);
    out.row(k + 1) = state.transpose();
  }
  return out;
}

WeightParams solver_weights(const CoefficientSet& coeffs, double lambda) {
  const double kappa = coeffs.constants.count("c1") ? coeffs.constant("c1") : 0.0;
  return WeightParams::make(kappa, lambda);
}

SkeletonResult picard_solve(const CoefficientSet& coeffs, const Field& u0,
                            const ControlField& h, const GridSpec& grid,
                            const SkeletonOptions& opts, const Trajectory& init) {
  PicardWorkspace ws(grid, solver_weights(coeffs, opts.lambda));
  SkeletonResult out;
  Trajectory current = init;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    Trajectory next = picard_map(coeffs, u0, h, grid, current, ws);
    const double gap = ((next - current).abs() * ws.weights).maxCoeff();
    current.swap(next);
    out.iterations = iter;
    out.residual = gap;
    if (gap < opts.tol) {
      out.trajectory = std::move(current);
      return out;
    }
  }
  throw NonConvergenceError("skeleton solve: Picard iteration did not reach tolerance " +
                                std::to_string(opts.tol) + " in " +
                                std::to_string(opts.max_iter) + " iterations",
                            out.residual);
}

}  // namespace

SkeletonResult solve_skeleton_lipschitz(const CoefficientSet& coeffs, const Field& u0,
                                        const ControlField& h, const GridSpec& grid,
                                        const SkeletonOptions& opts) {
  grid.validate();
  require_field_shape(u0, grid, "solve_skeleton");
  require_control_shape(h, grid, "solve_skeleton");
  if (coeffs.regime == Regime::LogLipschitz && !opts.assume_local_lipschitz)
    throw std::domain_error(
        "solve_skeleton_lipschitz: log-Lipschitz drift needs assume_local_lipschitz or the "
        "mollified path");
  if (coeffs.regime == Regime::Lipschitz && coeffs.constants.count("L") &&
      grid.dt() * coeffs.constant("L") >= 0.5)
    throw std::domain_error("solve_skeleton_lipschitz: dt * Lipschitz(b) >= 0.5");
  PicardWorkspace ws(grid, solver_weights(coeffs, opts.lambda));
  return picard_solve(coeffs, u0, h, grid, opts, heat_flow(u0, grid, ws));
}

MollifiedResult solve_skeleton_mollified(const CoefficientSet& coeffs, const Field& u0,
                                         const ControlField& h, const GridSpec& grid,
                                         const std::vector<int>& n_schedule, double tol,
                                         const SkeletonOptions& opts) {
  if (coeffs.regime != Regime::LogLipschitz)
    throw std::domain_error("solve_skeleton_mollified: expects a log-Lipschitz coefficient set");
  if (n_schedule.size() < 2)
    throw std::domain_error("solve_skeleton_mollified: need at least two mollification levels");

  const Eigen::ArrayXXd weights = weight_table(solver_weights(coeffs, opts.lambda), grid);
  MollifiedResult out;
  Trajectory prev;
  for (std::size_t j = 0; j < n_schedule.size(); ++j) {
    CoefficientSet lip = mollify_set(coeffs, n_schedule[j]);
    SkeletonResult solved = solve_skeleton_lipschitz(lip, u0, h, grid, opts);
    if (j > 0) {
      const double gap = ((solved.trajectory - prev).abs() * weights).maxCoeff();
      out.table.push_back({n_schedule[j - 1], n_schedule[j], gap});
    }
    prev = std::move(solved.trajectory);
  }
  out.trajectory = std::move(prev);
  out.converged = !out.table.empty() && out.table.back().gap < tol;
  return out;
}

UniquenessReport uniqueness_probe(const CoefficientSet& coeffs, const Field& u0,
                                  const ControlField& h, const GridSpec& grid,
                                  int random_inits, std::uint64_t seed,
                                  const SkeletonOptions& opts) {
  SkeletonOptions local = opts;
  if (coeffs.regime == Regime::LogLipschitz) local.assume_local_lipschitz = true;
  PicardWorkspace ws(grid, solver_weights(coeffs, local.lambda));

  std::vector<Trajectory> inits;
  inits.push_back(Trajectory::Zero(grid.n_t + 1, grid.n_x));
  inits.push_back(heat_flow(u0, grid, ws));
  for (int r = 0; r < random_inits; ++r) {
    Trajectory rand_init(grid.n_t + 1, grid.n_x);
    CounterRng rng(seed, static_cast<std::uint64_t>(r), /*domain=*/0xB0);
    for (int k = 0; k <= grid.n_t; ++k)
      for (int i = 0; i < grid.n_x; ++i) rand_init(k, i) = rng.uniform(-1.0, 1.0);
    inits.push_back(std::move(rand_init));
  }

  UniquenessReport rep;
  rep.tolerance = 10.0 * local.tol;
  Trajectory reference;
  for (std::size_t j = 0; j < inits.size(); ++j) {
    SkeletonResult solved = picard_solve(coeffs, u0, h, grid, local, inits[j]);
    if (j == 0) {
      reference = std::move(solved.trajectory);
      continue;
    }
    const double d = ((solved.trajectory - reference).abs() * ws.weights).maxCoeff();
    rep.disagreements.push_back(d);
    rep.max_disagreement = std::max(rep.max_disagreement, d);
  }
  rep.passed = rep.max_disagreement <= rep.tolerance;
  return rep;
}

namespace {

// Least-squares slope of log(increment sup) against log(lag).
double fit_holder_exponent(const std::vector<double>& lags, const std::vector<double>& sups) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (sups[i] <= 0.0) continue;
    const double x = std::log(lags[i]);
    const double y = std::log(sups[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

UniformBoundReport uniform_bound_diagnostic(const CoefficientSet& coeffs, const Field& u0,
                                            const ControlField& h, const GridSpec& grid,
                                            double lambda,
                                            const std::vector<int>& n_schedule) {
  if (coeffs.regime != Regime::LogLipschitz)
    throw std::domain_error("uniform_bound_diagnostic: expects a log-Lipschitz coefficient set");
  UniformBoundReport rep;
  rep.n_schedule = n_schedule;
  const WeightParams w = WeightParams::make(coeffs.constant("c1"), lambda);
  const Eigen::ArrayXXd weights = weight_table(w, grid);

  SkeletonOptions opts;
  opts.lambda = lambda;
  Trajectory control_term;
  for (int n : n_schedule) {
    CoefficientSet lip = mollify_set(coeffs, n);
    SkeletonResult solved = solve_skeleton_lipschitz(lip, u0, h, grid, opts);
    rep.weighted_sups.push_back((solved.trajectory.abs() * weights).maxCoeff());
    rep.max_weighted_sup = std::max(rep.max_weighted_sup, rep.weighted_sups.back());
    if (n == n_schedule.back()) {
      // control convolution term of the converged solution
      PicardWorkspace ws(grid, w);
      control_term.resize(grid.n_t + 1, grid.n_x);
      control_term.row(0).setZero();
      Field state = Field::Zero(grid.n_x);
      for (int k = 0; k < grid.n_t; ++k) {
        const Field y_k = solved.trajectory.row(k).transpose();
        state += grid.dt() * apply_fn(lip.sigma, y_k) * h.values.row(k).transpose();
        ws.step.apply_inplace(state);
        control_term.row(k + 1) = state.transpose();
      }
    }
  }

  // equicontinuity of the control term on a central window
  const double window = std::min(2.0, grid.half_width / 4.0);
  std::vector<int> window_idx;
  for (int i = 0; i < grid.n_x; ++i)
    if (std::abs(grid.x(i)) <= window) window_idx.push_back(i);
  const int k_lo = grid.n_t / 4, k_hi = 3 * grid.n_t / 4;

  std::vector<double> t_lags, t_sups;
  for (int lag = 4; lag <= grid.n_t / 8; lag *= 2) {
    double m = 0.0;
    for (int k = k_lo; k + lag <= k_hi; ++k)
      for (int i : window_idx)
        m = std::max(m, std::abs(control_term(k + lag, i) - control_term(k, i)));
    t_lags.push_back(lag * grid.dt());
    t_sups.push_back(m);
  }
  rep.control_term_time_exponent = fit_holder_exponent(t_lags, t_sups);

  std::vector<double> x_lags, x_sups;
  for (int lag = 1; lag <= grid.n_x / 16; lag *= 2) {
    double m = 0.0;
    for (int k = k_lo; k <= k_hi; ++k)
      for (int i : window_idx)
        m = std::max(m, std::abs(control_term(k, i + lag) - control_term(k, i)));
    x_lags.push_back(lag * grid.dx());
    x_sups.push_back(m);
  }
  rep.control_term_space_exponent = fit_holder_exponent(x_lags, x_sups);
  return rep;
}

}  // namespace srde
