#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srde/rate.hpp"

using namespace srde;

TEST_SUITE_BEGIN("rate");

namespace {

GridSpec test_grid(int n_t = 256, int n_x = 128) {
  GridSpec g;
  g.T = 1.0;
  g.n_t = n_t;
  g.half_width = 8.0;
  g.n_x = n_x;
  return g;
}

Field bump_field(const GridSpec& g, double amp) {
  Field f(g.n_x);
  for (int i = 0; i < g.n_x; ++i) f[i] = amp * std::exp(-0.5 * g.x(i) * g.x(i));
  return f;
}

ControlField smooth_control(const GridSpec& g, double amp) {
  Eigen::ArrayXXd hv(g.n_t, g.n_x);
  for (int k = 0; k < g.n_t; ++k)
    for (int i = 0; i < g.n_x; ++i)
      hv(k, i) = amp * (1.0 + 0.5 * std::sin(2.0 * M_PI * g.t(k))) *
                 std::exp(-0.5 * g.x(i) * g.x(i));
  return ControlField::make(hv, g);
}

}  // namespace

TEST_CASE("energy: closed form and quadratic scaling") {
  const GridSpec g = test_grid(32, 64);
  CHECK(energy(ControlField::zero(g), g) == 0.0);
  const ControlField ones = ControlField::make(Eigen::ArrayXXd::Ones(g.n_t, g.n_x), g);
  CHECK(energy(ones, g) == doctest::Approx(g.T * g.half_width));
  const ControlField tripled = ControlField::make(3.0 * ones.values, g);
  CHECK(energy(tripled, g) == doctest::Approx(9.0 * energy(ones, g)));
  // positive definiteness on the grid
  Eigen::ArrayXXd one_cell = Eigen::ArrayXXd::Zero(g.n_t, g.n_x);
  one_cell(3, 5) = 1e-7;
  CHECK(energy(ControlField::make(one_cell, g), g) > 0.0);
}

TEST_CASE("control inversion closes the loop on solver output") {
  const GridSpec g = test_grid();
  const CoefficientSet coeffs = builtin("lipschitz_tanh");
  const Field u0 = bump_field(g, 0.5);
  const ControlField h_true = smooth_control(g, 0.6);

  const Trajectory f = solve_skeleton_lipschitz(coeffs, u0, h_true, g).trajectory;
  const auto inv = invert_control(f, coeffs, u0, g);
  CHECK(inv.residual < 5e-3);
  const double e_true = energy(h_true, g);
  CHECK(energy(inv.control, g) == doctest::Approx(e_true).epsilon(0.02));
}

TEST_CASE("uncontrolled heat flow inverts to a nearly free control") {
  const GridSpec g = test_grid();
  const CoefficientSet coeffs = builtin("zero_drift_unit_sigma");
  const Field u0 = bump_field(g, 1.0);
  const Trajectory f =
      solve_skeleton_lipschitz(coeffs, u0, ControlField::zero(g), g).trajectory;
  const auto inv = invert_control(f, coeffs, u0, g);
  CHECK(energy(inv.control, g) < 1e-5);
}

TEST_CASE("inversion error paths") {
  const GridSpec g = test_grid(64, 64);
  const CoefficientSet coeffs = builtin("zero_drift_unit_sigma");
  const Field u0 = bump_field(g, 1.0);
  Trajectory f = solve_skeleton_lipschitz(coeffs, u0, ControlField::zero(g), g).trajectory;

  // wrong initial slice
  Trajectory shifted = f;
  shifted.row(0) += 0.5;
  CHECK_THROWS_AS(invert_control(shifted, coeffs, u0, g), std::invalid_argument);

  // vanishing diffusion along the path
  CoefficientSet vanishing = coeffs;
  vanishing.sigma = [](double u) { return u; };  // zero where the field is zero
  CHECK_THROWS_AS(invert_control(f, vanishing, u0, g, 1e-3), std::domain_error);

  // unreachable target: a jump in time is absorbed into a large residual
  Trajectory jump = f;
  for (int k = g.n_t / 2; k <= g.n_t; ++k) jump.row(k) += 0.5;
  jump.row(0) = u0.transpose();
  const auto inv = invert_control(jump, coeffs, u0, g);
  CHECK(inv.residual > 0.05);
}

TEST_CASE("endpoint rate minimization: linear benchmark") {
  const GridSpec g = test_grid();
  const CoefficientSet coeffs = builtin("zero_drift_unit_sigma");
  const Field u0 = Field::Zero(g.n_x);
  const EndpointConstraint constraint{0.0, 1.0};

  const auto res = minimize_rate_endpoint(coeffs, u0, constraint, g);
  CHECK(res.converged);
  CHECK(res.endpoint_gap < 1e-3);

  // discrete optimum a^2 / (2 Var) from the independent kernel oracle
  const double var = oracles::discrete_endpoint_variance(g, 0.0);
  CHECK(res.rate == doctest::Approx(1.0 / (2.0 * var)).epsilon(0.02));

  // quadratic scaling in the target
  const auto res2 = minimize_rate_endpoint(coeffs, u0, {0.0, 2.0}, g);
  CHECK(res2.rate == doctest::Approx(4.0 * res.rate).epsilon(0.03));

  // already-attained target costs nothing
  const auto res0 = minimize_rate_endpoint(coeffs, u0, {0.0, 0.0}, g);
  CHECK(res0.rate == doctest::Approx(0.0));
  CHECK(res0.converged);
}

TEST_CASE("optimizer stays below the inversion upper bound for reachable targets") {
  const GridSpec g = test_grid(128, 128);
  const CoefficientSet coeffs = builtin("lipschitz_tanh");
  const Field u0 = bump_field(g, 0.3);
  const ControlField h0 = smooth_control(g, 0.5);
  const Trajectory reachable = solve_skeleton_lipschitz(coeffs, u0, h0, g).trajectory;
  const double attained = reachable(g.n_t, g.n_x / 2);

  const auto res = minimize_rate_endpoint(coeffs, u0, {0.0, attained}, g);
  CHECK(res.converged);
  CHECK(res.rate <= energy(h0, g) * 1.001);
}

TEST_CASE("adjoint gradient matches finite differences") {
  const GridSpec g = test_grid(64, 64);
  const Field u0 = bump_field(g, 0.2);
  const EndpointConstraint constraint{0.0, 0.7};

  SUBCASE("pure energy objective: gradient is the control itself") {
    const ControlField h = smooth_control(g, 0.4);
    const auto model_free = finite_difference_gradient_check(
        h, builtin("zero_drift_unit_sigma"), u0, constraint, g, /*mu=*/0.0, 5);
    CHECK(model_free.max_rel_error < 1e-9);
  }

  SUBCASE("linear dynamics") {
    const ControlField h = smooth_control(g, 0.4);
    const auto rep = finite_difference_gradient_check(h, builtin("linear"), u0, constraint,
                                                      g, /*mu=*/500.0, 8);
    CHECK(rep.max_rel_error < 1e-6);
  }

  SUBCASE("log-superlinear drift near the small-field regime") {
    const ControlField h = smooth_control(g, 0.15);
    const auto rep = finite_difference_gradient_check(
        h, builtin("ulogu_bounded_sigma"), u0, constraint, g, /*mu=*/500.0, 8);
    CHECK(rep.max_rel_error < 1e-4);
  }
}

TEST_CASE("rate minimization reports non-convergence for unreachable targets") {
  const GridSpec g = test_grid(32, 32);
  // with sigma = 0 the endpoint ignores the control entirely
  CoefficientSet deaf;
  deaf.name = "deaf";
  deaf.b = [](double) { return 0.0; };
  deaf.sigma = [](double) { return 0.0; };
  deaf.db = [](double) { return 0.0; };
  deaf.dsigma = [](double) { return 0.0; };
  deaf.regime = Regime::Lipschitz;
  deaf.constants = {{"L", 0.0}};
  OptimizerConfig opt;
  opt.rounds = 2;
  opt.max_inner_iterations = 40;
  CHECK_THROWS_AS(
      minimize_rate_endpoint(deaf, Field::Zero(g.n_x), {0.0, 1.0}, g, opt),
      NonConvergenceError);
}

TEST_SUITE_END();
