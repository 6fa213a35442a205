#include "srde/rate.hpp"

#include <algorithm>
#include <cmath>

#include "srde/errors.hpp"
#include "srde/heat_kernel.hpp"
#include "srde/rng.hpp"

namespace srde {

double energy(const ControlField& h, const GridSpec& grid) {
  require_control_shape(h, grid, "energy");
  return 0.5 * h.values.square().sum() * grid.dt() * grid.dx();
}

InversionResult invert_control(const Trajectory& f, const CoefficientSet& coeffs,
                               const Field& u0, const GridSpec& grid, double sigma_min,
                               double init_tol) {
  require_trajectory_shape(f, grid, "invert_control");
  require_field_shape(u0, grid, "invert_control");
  const double init_gap = (f.row(0).transpose() - u0).abs().maxCoeff();
  if (init_gap > init_tol)
    throw std::invalid_argument("invert_control: trajectory does not start at u0 (gap " +
                                std::to_string(init_gap) + ")");

  Semigroup sg(grid);
  const double dt = grid.dt();
  Eigen::ArrayXXd h(grid.n_t, grid.n_x);
  for (int k = 0; k < grid.n_t; ++k) {
    const Field mid = 0.5 * (f.row(k) + f.row(k + 1)).transpose();
    const Field sigma_mid = apply_fn(coeffs.sigma, mid);
    if (sigma_mid.abs().minCoeff() < sigma_min)
      throw std::domain_error("invert_control: |sigma| fell below sigma_min along the path");
    const Field dfdt = (f.row(k + 1) - f.row(k)).transpose() / dt;
    h.row(k) =
        ((dfdt - 0.5 * sg.laplacian(mid) - apply_fn(coeffs.b, mid)) / sigma_mid).transpose();
  }

  InversionResult out;
  out.control = ControlField::make(std::move(h), grid);

  SkeletonOptions opts;
  opts.assume_local_lipschitz = true;
  const Trajectory resolved =
      solve_skeleton_lipschitz(coeffs, u0, out.control, grid, opts).trajectory;
  double dist = 0.0;
  for (int k = 0; k <= grid.n_t; ++k)
    for (int i = 0; i < grid.n_x; ++i)
      dist = std::max(dist, std::abs(resolved(k, i) - f(k, i)) *
                                std::exp(-std::abs(grid.x(i))));
  out.residual = dist;
  return out;
}

namespace {

struct ForwardModel {
  const CoefficientSet* coeffs;
  const GridSpec* grid;
  Field u0;
  int endpoint_index;
  Semigroup sg;
  Semigroup::Stepper step;

  ForwardModel(const CoefficientSet& c, const Field& u0_in, const GridSpec& g, double x0)
      : coeffs(&c), grid(&g), u0(u0_in), endpoint_index(0), sg(g), step(sg.stepper(g.dt())) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n_x; ++i) {
      const double d = std::abs(g.x(i) - x0);
      if (d < best) {
        best = d;
        endpoint_index = i;
      }
    }
  }

  // Direct recursion; identical to the skeleton fixed point.
  Trajectory solve(const Eigen::ArrayXXd& h) const {
    const double dt = grid->dt();
    Trajectory traj(grid->n_t + 1, grid->n_x);
    traj.row(0) = u0.transpose();
    Field state = u0;
    for (int k = 0; k < grid->n_t; ++k) {
      state += dt * apply_fn(coeffs->b, state) +
               dt * apply_fn(coeffs->sigma, state) * h.row(k).transpose();
      step.apply_inplace(state);
      traj.row(k + 1) = state.transpose();
    }
    return traj;
  }

  double objective(const Eigen::ArrayXXd& h, double mu, double a, double* endpoint) const {
    const Trajectory traj = solve(h);
    const double y_end = traj(grid->n_t, endpoint_index);
    if (endpoint) *endpoint = y_end;
    const double penalty = 0.5 * mu * (y_end - a) * (y_end - a);
    return 0.5 * h.square().sum() * grid->dt() * grid->dx() + penalty;
  }

  // L2 gradient of the penalized objective from the exact discrete adjoint:
  // running the recursion backwards with the transposed linearization.
  Eigen::ArrayXXd gradient(const Eigen::ArrayXXd& h, double mu, double a,
                           double* endpoint) const {
    const double dt = grid->dt();
    const double inv_dx = 1.0 / grid->dx();
    const Trajectory traj = solve(h);
    const double y_end = traj(grid->n_t, endpoint_index);
    if (endpoint) *endpoint = y_end;

    Eigen::ArrayXXd grad = h;
    Field adjoint = Field::Zero(grid->n_x);
    adjoint[endpoint_index] = mu * (y_end - a);
    for (int k = grid->n_t - 1; k >= 0; --k) {
      step.apply_inplace(adjoint);  // P_dt is self-adjoint
      const Field y_k = traj.row(k).transpose();
      grad.row(k) += (apply_fn(coeffs->sigma, y_k) * adjoint * inv_dx).transpose();
      adjoint *= 1.0 + dt * apply_fn(coeffs->db, y_k) +
                 dt * apply_fn(coeffs->dsigma, y_k) * h.row(k).transpose();
    }
    return grad;
  }
};

// Barzilai-Borwein step with Armijo backtracking on the penalty subproblem.
int minimize_penalized(const ForwardModel& model, Eigen::ArrayXXd& h, double mu, double a,
                       const OptimizerConfig& opt, const GridSpec& grid) {
  const double cell = grid.dt() * grid.dx();
  double endpoint = 0.0;
  double fval = model.objective(h, mu, a, &endpoint);
  Eigen::ArrayXXd grad = model.gradient(h, mu, a, nullptr);
  double alpha = 1.0 / (1.0 + mu);
  Eigen::ArrayXXd h_prev, g_prev;
  int iter = 0;
  for (; iter < opt.max_inner_iterations; ++iter) {
    const double gnorm2 = grad.square().sum() * cell;
    if (std::sqrt(gnorm2) < opt.grad_tol) break;
    if (iter > 0) {
      const Eigen::ArrayXXd dh = h - h_prev;
      const Eigen::ArrayXXd dg = grad - g_prev;
      const double dgg = dg.square().sum();
      if (dgg > 0.0) alpha = std::clamp((dh * dg).sum() / dgg, 1e-12, 1e8);
    }
    h_prev = h;
    g_prev = grad;
    double step_len = alpha;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      Eigen::ArrayXXd trial = h - step_len * grad;
      const double ftrial = model.objective(trial, mu, a, nullptr);
      if (ftrial <= fval - opt.armijo_c * step_len * gnorm2) {
        h = std::move(trial);
        fval = ftrial;
        accepted = true;
        break;
      }
      step_len *= 0.5;
    }
    if (!accepted) break;  // step collapsed; gradient is as converged as it gets
    grad = model.gradient(h, mu, a, nullptr);
  }
  return iter;
}

}  // namespace

RateResult minimize_rate_endpoint(const CoefficientSet& coeffs, const Field& u0,
                                  const EndpointConstraint& constraint, const GridSpec& grid,
                                  const OptimizerConfig& opt) {
  grid.validate();
  require_field_shape(u0, grid, "minimize_rate_endpoint");
  ForwardModel model(coeffs, u0, grid, constraint.x0);

  RateResult best;
  bool have_best = false;
  for (int restart = 0; restart < std::max(1, opt.restarts); ++restart) {
    Eigen::ArrayXXd h = Eigen::ArrayXXd::Zero(grid.n_t, grid.n_x);
    if (restart > 0) {
      CounterRng rng(opt.restart_seed, static_cast<std::uint64_t>(restart));
      for (int k = 0; k < grid.n_t; ++k)
        for (int i = 0; i < grid.n_x; ++i) h(k, i) = 0.5 * rng.normal();
    }

    RateResult result;
    double mu = opt.mu0;
    for (int round = 0; round < opt.rounds; ++round) {
      const int iters = minimize_penalized(model, h, mu, constraint.a, opt, grid);
      double endpoint = 0.0;
      const double obj = model.objective(h, mu, constraint.a, &endpoint);
      OptimizerHistoryRow row;
      row.mu = mu;
      row.inner_iterations = iters;
      row.objective = obj;
      row.energy = 0.5 * h.square().sum() * grid.dt() * grid.dx();
      row.endpoint_gap = std::abs(endpoint - constraint.a);
      result.history.push_back(row);
      result.endpoint_value = endpoint;
      result.endpoint_gap = row.endpoint_gap;
      result.rate = row.energy;
      if (row.endpoint_gap < opt.constraint_tol) {
        result.converged = true;
        break;
      }
      mu *= opt.mu_factor;
    }
    result.control = ControlField::make(std::move(h), grid);
    if (!have_best || (result.converged && !best.converged) ||
        (result.converged == best.converged && result.rate < best.rate)) {
      best = std::move(result);
      have_best = true;
    }
  }

  if (!best.converged)
    throw NonConvergenceError("minimize_rate_endpoint: constraint gap " +
                                  std::to_string(best.endpoint_gap) +
                                  " did not fall below tolerance",
                              best.endpoint_gap);
  return best;
}

GradCheckReport finite_difference_gradient_check(const ControlField& h,
                                                 const CoefficientSet& coeffs,
                                                 const Field& u0,
                                                 const EndpointConstraint& constraint,
                                                 const GridSpec& grid, double mu, int probes,
                                                 std::uint64_t seed) {
  require_control_shape(h, grid, "finite_difference_gradient_check");
  ForwardModel model(coeffs, u0, grid, constraint.x0);
  const double cell = grid.dt() * grid.dx();
  const Eigen::ArrayXXd grad = model.gradient(h.values, mu, constraint.a, nullptr);

  GradCheckReport rep;
  const double tau = 1e-5 * std::max(1.0, h.values.abs().maxCoeff());
  for (int p = 0; p < probes; ++p) {
    Eigen::ArrayXXd dir(grid.n_t, grid.n_x);
    CounterRng rng(seed, static_cast<std::uint64_t>(p));
    for (int k = 0; k < grid.n_t; ++k)
      for (int i = 0; i < grid.n_x; ++i) dir(k, i) = rng.normal();
    dir /= std::sqrt(dir.square().sum() * cell);  // unit L2 norm

    GradCheckRow row;
    row.adjoint_derivative = (grad * dir).sum() * cell;
    const double fp = model.objective(h.values + tau * dir, mu, constraint.a, nullptr);
    const double fm = model.objective(h.values - tau * dir, mu, constraint.a, nullptr);
    row.fd_derivative = (fp - fm) / (2.0 * tau);
    const double scale =
        std::max({std::abs(row.adjoint_derivative), std::abs(row.fd_derivative), 1e-12});
    row.rel_error = std::abs(row.adjoint_derivative - row.fd_derivative) / scale;
    rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
    rep.probes.push_back(row);
  }
  return rep;
}

}  // namespace srde
