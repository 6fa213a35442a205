#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srde/noise.hpp"
#include "srde/skeleton.hpp"
#include "srde/spde.hpp"

using namespace srde;

TEST_SUITE_BEGIN("spde");

namespace {

GridSpec test_grid(int n_t = 128, int n_x = 128) {
  GridSpec g;
  g.T = 1.0;
  g.n_t = n_t;
  g.half_width = 8.0;
  g.n_x = n_x;
  return g;
}

CoefficientSet frozen_coefficients() {
  CoefficientSet c;
  c.name = "frozen";
  c.b = [](double) { return 0.0; };
  c.sigma = [](double) { return 0.0; };
  c.db = [](double) { return 0.0; };
  c.dsigma = [](double) { return 0.0; };
  c.regime = Regime::Lipschitz;
  c.constants = {{"L", 0.0}};
  return c;
}

}  // namespace

TEST_CASE("pure heat flow propagates a kernel slice") {
  const GridSpec g = test_grid();
  SolveConfig cfg;
  cfg.coeffs = frozen_coefficients();
  cfg.grid = g;
  cfg.eps = 0.7;  // irrelevant with sigma = 0
  cfg.u0.resize(g.n_x);
  const double s = 0.4;
  for (int i = 0; i < g.n_x; ++i) cfg.u0[i] = oracles::gauss_kernel(s, g.x(i), 0.0);
  const Trajectory traj = solve_spde(cfg).trajectory;
  for (int k : {g.n_t / 2, g.n_t}) {
    const double t = g.t(k);
    for (int i = 0; i < g.n_x; i += 7)
      CHECK(traj(k, i) ==
            doctest::Approx(oracles::gauss_kernel(s + t, g.x(i), 0.0)).epsilon(1e-4));
  }
}

TEST_CASE("linear case reduces to the smoothed noise accumulation") {
  const GridSpec g = test_grid();
  SolveConfig cfg;
  cfg.coeffs = builtin("zero_drift_unit_sigma");
  cfg.grid = g;
  cfg.u0 = Field::Zero(g.n_x);
  cfg.eps = 1.0;
  cfg.seed = 99;
  cfg.stream = 3;
  const Trajectory traj = solve_spde(cfg).trajectory;

  const auto noise = sample_noise(g, 99, 3);
  const Trajectory conv =
      stochastic_convolution(Trajectory::Ones(g.n_t + 1, g.n_x), noise);
  CHECK((traj - conv).abs().maxCoeff() < 1e-12);
}

TEST_CASE("noise intensity scales as sqrt(eps) in the linear case") {
  const GridSpec g = test_grid(64, 64);
  SolveConfig cfg;
  cfg.coeffs = builtin("zero_drift_unit_sigma");
  cfg.grid = g;
  cfg.u0 = Field::Zero(g.n_x);
  cfg.seed = 5;
  cfg.eps = 1.0;
  const Trajectory full = solve_spde(cfg).trajectory;
  cfg.eps = 0.25;
  const Trajectory quarter = solve_spde(cfg).trajectory;
  CHECK((quarter - 0.5 * full).abs().maxCoeff() < 1e-12);
}

TEST_CASE("zero noise with control matches the skeleton fixed point") {
  const GridSpec g = test_grid();
  const CoefficientSet coeffs = builtin("lipschitz_tanh");
  Field u0(g.n_x);
  for (int i = 0; i < g.n_x; ++i) u0[i] = 0.6 * std::exp(-0.5 * g.x(i) * g.x(i));
  Eigen::ArrayXXd hv(g.n_t, g.n_x);
  for (int k = 0; k < g.n_t; ++k)
    for (int i = 0; i < g.n_x; ++i)
      hv(k, i) = 0.4 * std::sin(2.0 * M_PI * g.t(k)) * std::exp(-g.x(i) * g.x(i));
  const ControlField h = ControlField::make(hv, g);

  SolveConfig cfg;
  cfg.coeffs = coeffs;
  cfg.grid = g;
  cfg.u0 = u0;
  cfg.eps = 0.0;
  cfg.control = h.values;
  const Trajectory direct = solve_spde(cfg).trajectory;
  const Trajectory picard = solve_skeleton_lipschitz(coeffs, u0, h, g).trajectory;
  CHECK((direct - picard).abs().maxCoeff() < 1e-6);
}

TEST_CASE("superposition of control and noise is exact in the linear case") {
  const GridSpec g = test_grid(64, 64);
  SolveConfig cfg;
  cfg.coeffs = builtin("zero_drift_unit_sigma");
  cfg.grid = g;
  cfg.u0 = Field::Zero(g.n_x);
  cfg.seed = 12;

  Eigen::ArrayXXd h1 = Eigen::ArrayXXd::Zero(g.n_t, g.n_x);
  Eigen::ArrayXXd h2 = h1;
  for (int k = 0; k < g.n_t; ++k)
    for (int i = 0; i < g.n_x; ++i) {
      h1(k, i) = std::exp(-g.x(i) * g.x(i));
      h2(k, i) = 0.5 * std::cos(g.x(i)) * std::exp(-0.3 * g.x(i) * g.x(i));
    }

  cfg.eps = 1.0;
  cfg.control = h1 + h2;
  const Trajectory both = solve_spde(cfg).trajectory;
  cfg.control = h1;
  const Trajectory first = solve_spde(cfg).trajectory;
  cfg.control = h2;
  const Trajectory second = solve_spde(cfg).trajectory;
  cfg.control.reset();
  const Trajectory noise_only = solve_spde(cfg).trajectory;

  CHECK((both - first - second + noise_only).abs().maxCoeff() < 1e-10);
}

TEST_CASE("grid refinement keeps the endpoint variance stable in the linear case") {
  const double coarse = oracles::discrete_endpoint_variance(test_grid(128, 128), 0.0);
  const double fine = oracles::discrete_endpoint_variance(test_grid(256, 256), 0.0);
  CHECK(std::abs(fine - coarse) / fine < 0.05);
}

TEST_CASE("blow-up carries the first bad coordinate") {
  const GridSpec g = test_grid(32, 32);
  CoefficientSet cubic;
  cubic.name = "cubic";
  cubic.b = [](double u) { return u * u * u; };
  cubic.sigma = [](double) { return 0.0; };
  cubic.db = [](double u) { return 3.0 * u * u; };
  cubic.dsigma = [](double) { return 0.0; };
  cubic.regime = Regime::LogLipschitz;

  SolveConfig cfg;
  cfg.coeffs = cubic;
  cfg.grid = g;
  cfg.u0 = Field::Constant(g.n_x, 1e3);
  cfg.eps = 0.0;
  CHECK_THROWS_AS(solve_spde(cfg), BlowUpError);
}

TEST_CASE("stability guard rejects too-stiff Lipschitz drifts") {
  const GridSpec g = test_grid(4, 32);  // dt = 0.25
  CoefficientSet stiff = builtin("linear");
  stiff.constants["L"] = 10.0;
  SolveConfig cfg;
  cfg.coeffs = stiff;
  cfg.grid = g;
  cfg.u0 = Field::Zero(g.n_x);
  CHECK_THROWS_AS(solve_spde(cfg), std::domain_error);
}

TEST_CASE("windowed sups grow with the window and fit a sqrt-log profile") {
  GridSpec g;
  g.T = 1.0;
  g.n_t = 64;
  g.half_width = 64.0;
  g.n_x = 1024;
  const std::vector<double> windows = {0.25, 2.0, 8.0, 32.0};
  const auto table = explosion_demo(1.0, windows, 120, 88, g);

  REQUIRE(table.rows.size() == windows.size());
  CHECK(table.strictly_increasing);

  // the smallest window tracks the single-point folded-normal mean
  const double v = oracles::discrete_endpoint_variance(g, 0.0);
  const double folded = oracles::folded_normal_mean(v);
  CHECK(table.rows.front().mean_sup > 0.9 * folded);
  CHECK(table.rows.front().mean_sup < 1.5 * folded);

  // rough exponent band on this smoke run; the acceptance run pins it tighter
  CHECK(table.fitted_exponent > 0.2);
  CHECK(table.fitted_exponent < 0.8);

  CHECK_THROWS_AS(explosion_demo(1.0, {1.0, 200.0}, 10, 1, g), std::domain_error);
}

TEST_SUITE_END();
