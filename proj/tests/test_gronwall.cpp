#include <doctest.h>

#include <cmath>

#include "srde/gronwall.hpp"
#include "srde/rng.hpp"

using namespace srde;

TEST_SUITE_BEGIN("gronwall");

TEST_CASE("log-growth bound: degenerate and classical limits") {
  const double c0 = 2.5, t = 1.3;
  CHECK(log_plus_bound(c0, RateTable::constant(0.0, 0.0, t), t) == doctest::Approx(c0));
  // c2 = 0 reduces to the classical exponential bound
  const double a = 0.8;
  CHECK(log_plus_bound(c0, RateTable::constant(a, 0.0, t), t) ==
        doctest::Approx(c0 * std::exp(a * t)).epsilon(1e-12));
  // c1 = 0 is the pure double-exponential form
  CHECK(log_plus_bound(c0, RateTable::constant(0.0, a, t), t) ==
        doctest::Approx(std::pow(c0, std::exp(a * t))).epsilon(1e-12));
  CHECK_THROWS_AS(log_plus_bound(0.9, RateTable::constant(1.0, 1.0, t), t),
                  std::domain_error);
}

TEST_CASE("reciprocal-log bound: stated evaluations") {
  const double t = 1.0;
  // c2 = 0: exponent collapses and the prefactor doubles
  const double c0 = 0.3, a = 1.1;
  CHECK(log_reciprocal_bound(c0, RateTable::constant(a, 0.0, t), t) ==
        doctest::Approx(2.0 * c0 * std::exp(a * t)).epsilon(1e-12));
  // c0 = 0 forces the zero bound
  CHECK(log_reciprocal_bound(0.0, RateTable::constant(0.0, 2.0, t), t) == 0.0);
  // c0 = 1, c1 = 0, c2 = 1, t = 1: (1 + 1) e
  CHECK(log_reciprocal_bound(1.0, RateTable::constant(0.0, 1.0, t), t) ==
        doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(log_reciprocal_bound(-0.1, RateTable::constant(0.0, 1.0, t), t),
                  std::domain_error);
}

TEST_CASE("certification: closed-form worst cases") {
  // y' = y log y from y(0) = 2 solves to 2^{e^t}; the bound is exactly that
  auto cert = certify_against_ode(GronwallLemma::LogGrowth, 2.0,
                                  RateTable::constant(0.0, 1.0, 1.0), 1.0, 4000);
  const double closed = std::pow(2.0, std::exp(1.0));
  CHECK(cert.ode_value == doctest::Approx(closed).epsilon(1e-9));
  CHECK(cert.bound_value == doctest::Approx(closed).epsilon(1e-12));
  CHECK(cert.dominated);
  CHECK(cert.refinement_delta < 1e-8);

  // equality case y' = c1 y
  auto lin = certify_against_ode(GronwallLemma::LogGrowth, 3.0,
                                 RateTable::constant(0.7, 0.0, 2.0), 2.0, 4000);
  CHECK(lin.ode_value == doctest::Approx(3.0 * std::exp(1.4)).epsilon(1e-9));
  CHECK(lin.bound_value == doctest::Approx(lin.ode_value).epsilon(1e-6));
  CHECK(lin.dominated);

  // reciprocal-log lemma with c2 = 0 is linear and the bound has slack 2x
  auto rec = certify_against_ode(GronwallLemma::ReciprocalLog, 0.4,
                                 RateTable::constant(1.2, 0.0, 1.0), 1.0, 4000);
  CHECK(rec.ode_value == doctest::Approx(0.4 * std::exp(1.2)).epsilon(1e-9));
  CHECK(rec.bound_value == doctest::Approx(2.0 * rec.ode_value).epsilon(1e-9));
  CHECK(rec.dominated);

  // zero start stays at zero
  auto zero = certify_against_ode(GronwallLemma::ReciprocalLog, 0.0,
                                  RateTable::constant(0.0, 1.5, 1.0), 1.0, 1000);
  CHECK(zero.ode_value == 0.0);
  CHECK(zero.bound_value == 0.0);
  CHECK(zero.dominated);
}

namespace {

RateTable random_piecewise(CounterRng& rng, double t_end, double max_rate) {
  RateTable r;
  r.t_end = t_end;
  const int pieces = 4 + static_cast<int>(rng.uniform() * 5);
  r.c1.resize(pieces);
  r.c2.resize(pieces);
  for (int i = 0; i < pieces; ++i) {
    r.c1[i] = rng.uniform(0.0, max_rate);
    r.c2[i] = rng.uniform(0.0, max_rate);
  }
  return r;
}

}  // namespace

TEST_CASE("domination on randomized configurations") {
  CounterRng rng(31, 0);
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(0.2, 2.0);
    RateTable rates = random_piecewise(rng, t, 1.5);
    const double c0_log = rng.uniform(1.0, 5.0);
    auto a = certify_against_ode(GronwallLemma::LogGrowth, c0_log, rates, t, 2000);
    if (!a.dominated) ++failures;
    const double c0_rec = rng.uniform(0.0, 5.0);
    auto b = certify_against_ode(GronwallLemma::ReciprocalLog, c0_rec, rates, t, 2000);
    if (!b.dominated) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("bounds are monotone in c0, the linear rate, and time") {
  CounterRng rng(32, 0);
  for (int i = 0; i < 40; ++i) {
    const double t = rng.uniform(0.3, 1.5);
    const double c1 = rng.uniform(0.0, 1.0);
    const double c2 = rng.uniform(0.0, 1.0);
    const double c0 = rng.uniform(1.0, 4.0);
    const double eps = 1e-3;

    const double base_log = log_plus_bound(c0, RateTable::constant(c1, c2, t), t);
    CHECK(log_plus_bound(c0 + eps, RateTable::constant(c1, c2, t), t) >= base_log);
    CHECK(log_plus_bound(c0, RateTable::constant(c1 + eps, c2, t), t) >= base_log);
    CHECK(log_plus_bound(c0, RateTable::constant(c1, c2, t + eps), t + eps) >= base_log);

    const double base_rec = log_reciprocal_bound(c0, RateTable::constant(c1, c2, t), t);
    CHECK(log_reciprocal_bound(c0 + eps, RateTable::constant(c1, c2, t), t) >= base_rec);
    CHECK(log_reciprocal_bound(c0, RateTable::constant(c1 + eps, c2, t), t) >= base_rec);
    CHECK(log_reciprocal_bound(c0, RateTable::constant(c1, c2, t + eps), t + eps) >=
          base_rec);
  }
}

TEST_CASE("input validation") {
  RateTable bad;
  bad.t_end = 1.0;
  bad.c1 = Eigen::ArrayXd::Constant(3, -0.5);
  bad.c2 = Eigen::ArrayXd::Constant(3, 0.5);
  CHECK_THROWS_AS(log_plus_bound(1.0, bad, 1.0), std::domain_error);
  CHECK_THROWS_AS(certify_against_ode(GronwallLemma::LogGrowth, 1.0,
                                      RateTable::constant(1.0, 1.0, 1.0), 1.0, 1),
                  std::domain_error);
}

TEST_SUITE_END();
