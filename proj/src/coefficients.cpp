#include "srde/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "srde/rng.hpp"
#include "srde/weights.hpp"

namespace srde {

namespace {

constexpr int kBumpNodes = 96;

double bump_raw(double u) {
  const double s = 1.0 - u * u;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// Midpoint nodes/weights on (-1,1) for the bump; the normalization uses the
// same rule, so the discrete mollifier has unit mass and zero first moment
// exactly and affine functions are preserved to machine precision.
struct BumpRule {
  double nodes[kBumpNodes];
  double weights[kBumpNodes];  // already include the normalization constant
  BumpRule() {
    const double h = 2.0 / kBumpNodes;
    double mass = 0.0;
    for (int i = 0; i < kBumpNodes; ++i) {
      nodes[i] = -1.0 + (i + 0.5) * h;
      weights[i] = bump_raw(nodes[i]) * h;
      mass += weights[i];
    }
    for (int i = 0; i < kBumpNodes; ++i) weights[i] /= mass;
  }
};

const BumpRule& bump_rule() {
  static const BumpRule rule;
  return rule;
}

// CDF of the normalized bump on the same midpoint rule.
double bump_cdf(double v) {
  if (v <= -1.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const BumpRule& rule = bump_rule();
  double acc = 0.0;
  for (int i = 0; i < kBumpNodes && rule.nodes[i] <= v; ++i) acc += rule.weights[i];
  return std::min(acc, 1.0);
}

}  // namespace

double mollifier_cutoff(double x, int n) {
  const double tau = (n + 2.0 - std::abs(x)) / 2.0;
  if (tau <= 0.0) return 0.0;
  if (tau >= 1.0) return 1.0;
  return bump_cdf(2.0 * tau - 1.0);
}

ScalarFn mollify(const ScalarFn& f, int n) {
  if (n < 1) throw std::domain_error("mollify: n must be >= 1");
  return [f, n](double x) {
    const double eta = mollifier_cutoff(x, n);
    if (eta == 0.0) return 0.0;
    const BumpRule& rule = bump_rule();
    double acc = 0.0;
    for (int i = 0; i < kBumpNodes; ++i) acc += rule.weights[i] * f(x - rule.nodes[i] / n);
    return eta * acc;
  };
}

CoefficientSet mollify_set(const CoefficientSet& coeffs, int n) {
  CoefficientSet out;
  out.name = coeffs.name + "_mollified_" + std::to_string(n);
  out.b = mollify(coeffs.b, n);
  out.sigma = mollify(coeffs.sigma, n);
  out.regime = Regime::Lipschitz;
  // empirical Lipschitz constant over the cutoff support, for stability guards
  const double reach = n + 3.0;
  const int probes = 2048;
  double lip = 0.0;
  double prev_x = -reach, prev_b = out.b(-reach), prev_s = out.sigma(-reach);
  for (int i = 1; i <= probes; ++i) {
    const double x = -reach + 2.0 * reach * i / probes;
    const double bx = out.b(x), sx = out.sigma(x);
    lip = std::max(lip, (std::abs(bx - prev_b) + std::abs(sx - prev_s)) / (x - prev_x));
    prev_x = x;
    prev_b = bx;
    prev_s = sx;
  }
  out.constants["L"] = lip;
  if (coeffs.constants.count("K_sigma")) out.constants["K_sigma"] = coeffs.constant("K_sigma");
  if (coeffs.constants.count("c1")) out.constants["c1"] = coeffs.constant("c1");
  return out;
}

namespace {

// Violation accounting: slack = bound - value; tolerance scales with the bound.
void record(ViolationReport& rep, double slack, double scale, std::vector<double> point) {
  ++rep.samples;
  if (slack < -1e-12 * std::max(1.0, scale)) ++rep.violations;
  if (slack < rep.worst_slack) {
    rep.worst_slack = slack;
    rep.worst_point = std::move(point);
  }
}

// Log-uniform magnitudes up to 1e3 plus a fine mesh around the log_+ kinks.
std::vector<double> hypothesis_mesh() {
  std::vector<double> mesh;
  for (int k = -40; k <= 40; ++k) {
    mesh.push_back(k * 1e-4);
    mesh.push_back(1.0 + k * 1e-4);
    mesh.push_back(-1.0 + k * 1e-4);
  }
  mesh.push_back(std::exp(-1.0));
  mesh.push_back(-std::exp(-1.0));
  return mesh;
}

}  // namespace

ViolationReport verify_h1_growth(const ScalarFn& b, double c1, double c2, long samples,
                                 std::uint64_t seed) {
  if (samples <= 0) throw std::domain_error("verify_h1_growth: samples must be > 0");
  ViolationReport rep;
  auto check = [&](double u) {
    const double bound = c1 * std::abs(u) * log_plus(std::abs(u)) + c2;
    record(rep, bound - std::abs(b(u)), bound, {u});
  };
  for (double u : hypothesis_mesh()) check(u);
  CounterRng rng(seed, /*stream=*/1);
  for (long i = 0; i < samples; ++i) check(rng.signed_log_uniform(1e-6, 1e3));
  return rep;
}

ViolationReport verify_h1_log_lipschitz(const ScalarFn& b, double c3, double c4, double c5,
                                        long sample_pairs, std::uint64_t seed) {
  if (sample_pairs <= 0)
    throw std::domain_error("verify_h1_log_lipschitz: sample_pairs must be > 0");
  ViolationReport rep;
  auto check = [&](double u, double v) {
    const double d = std::abs(u - v);
    const double bound = c3 * d * log_plus(d > 0.0 ? 1.0 / d : 0.0) +
                         c4 * log_plus(std::max(std::abs(u), std::abs(v))) * d + c5 * d;
    record(rep, bound - std::abs(b(u) - b(v)), bound, {u, v});
  };
  const auto mesh = hypothesis_mesh();
  for (std::size_t i = 0; i + 1 < mesh.size(); i += 2) check(mesh[i], mesh[i + 1]);
  for (double u : mesh) check(u, 0.0);
  CounterRng rng(seed, /*stream=*/2);
  for (long i = 0; i < sample_pairs; ++i) {
    const double u = rng.signed_log_uniform(1e-6, 1e3);
    // half the pairs are near-coincident, where the log modulus is active
    const double v = (i % 2 == 0) ? rng.signed_log_uniform(1e-6, 1e3)
                                  : u + rng.signed_log_uniform(1e-9, 1e-1);
    check(u, v);
  }
  return rep;
}

ViolationReport verify_h0_lipschitz(const CoefficientSet& coeffs, long sample_pairs,
                                    std::uint64_t seed) {
  if (sample_pairs <= 0)
    throw std::domain_error("verify_h0_lipschitz: sample_pairs must be > 0");
  const double L = coeffs.constant("L");
  ViolationReport rep;
  CounterRng rng(seed, /*stream=*/4);
  for (long i = 0; i < sample_pairs; ++i) {
    const double u = rng.signed_log_uniform(1e-6, 1e3);
    const double v = (i % 2 == 0) ? rng.signed_log_uniform(1e-6, 1e3)
                                  : u + rng.signed_log_uniform(1e-9, 1.0);
    const double lhs = std::abs(coeffs.b(u) - coeffs.b(v)) +
                       std::abs(coeffs.sigma(u) - coeffs.sigma(v));
    const double bound = L * std::abs(u - v);
    record(rep, bound - lhs, std::max(1.0, bound), {u, v});
  }
  return rep;
}

MollifiedBoundsReport verify_mollified_bounds(const CoefficientSet& coeffs,
                                              const std::vector<int>& n_list, long samples,
                                              std::uint64_t seed) {
  if (coeffs.regime != Regime::LogLipschitz)
    throw std::domain_error("verify_mollified_bounds: expects an H1-regime coefficient set");
  const double c1 = coeffs.constant("c1");
  const double k_sigma = coeffs.constant("K_sigma");
  MollifiedBoundsReport rep;
  rep.n_list = n_list;

  std::vector<ScalarFn> bs, sigmas;
  for (int n : n_list) {
    bs.push_back(mollify(coeffs.b, n));
    sigmas.push_back(mollify(coeffs.sigma, n));
  }

  // Fit the growth constant on a dense grid covering every cutoff support;
  // the grid must resolve the finest mollification scale 1/n.
  const int max_n = *std::max_element(n_list.begin(), n_list.end());
  const double reach = max_n + 2.5;
  const int fit_points =
      std::min(300000, std::max(4000, static_cast<int>(2.0 * reach * 8.0 * max_n)));
  for (std::size_t j = 0; j < bs.size(); ++j) {
    double fit = 0.0;
    for (int i = 0; i <= fit_points; ++i) {
      const double x = -reach + 2.0 * reach * i / fit_points;
      const double residual = std::abs(bs[j](x)) - c1 * std::abs(x) * log_plus(std::abs(x));
      fit = std::max(fit, residual / (std::abs(x) + 1.0));
    }
    rep.fitted_growth_constant.push_back(fit);
    rep.frozen_growth_constant = std::max(rep.frozen_growth_constant, fit);
  }
  // headroom for the value between fit nodes
  rep.frozen_growth_constant = rep.frozen_growth_constant * (1.0 + 1e-4) + 1e-9;

  CounterRng rng(seed, /*stream=*/3);
  for (long i = 0; i < samples; ++i) {
    const double x = rng.signed_log_uniform(1e-4, reach);
    for (std::size_t j = 0; j < bs.size(); ++j) {
      const double drift_bound = c1 * std::abs(x) * log_plus(std::abs(x)) +
                                 rep.frozen_growth_constant * (std::abs(x) + 1.0);
      record(rep.drift_bound, drift_bound - std::abs(bs[j](x)), drift_bound,
             {x, static_cast<double>(n_list[j])});
      record(rep.diffusion_bound, k_sigma - std::abs(sigmas[j](x)), k_sigma,
             {x, static_cast<double>(n_list[j])});
    }
  }
  return rep;
}

namespace {

double ulogu(double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)); }
double dulogu(double u) { return std::log(std::max(std::abs(u), 1e-12)) + 1.0; }

}  // namespace

CoefficientSet builtin(const std::string& name) {
  CoefficientSet c;
  c.name = name;
  if (name == "zero_drift_unit_sigma") {
    c.b = [](double) { return 0.0; };
    c.sigma = [](double) { return 1.0; };
    c.db = [](double) { return 0.0; };
    c.dsigma = [](double) { return 0.0; };
    c.regime = Regime::Lipschitz;
    c.constants = {{"L", 1.0}, {"L_b", 0.0}, {"K_sigma", 1.0}, {"sigma_min", 1.0}};
  } else if (name == "linear") {
    const double a = 0.5;
    c.b = [a](double u) { return a * u; };
    c.sigma = [](double) { return 1.0; };
    c.db = [a](double) { return a; };
    c.dsigma = [](double) { return 0.0; };
    c.regime = Regime::Lipschitz;
    c.constants = {{"L", a + 1.0}, {"a", a}, {"K_sigma", 1.0}, {"sigma_min", 1.0}};
  } else if (name == "lipschitz_tanh") {
    c.b = [](double u) { return std::tanh(u); };
    c.sigma = [](double u) { return 1.0 + 0.25 * std::tanh(u); };
    c.db = [](double u) {
      const double t = std::tanh(u);
      return 1.0 - t * t;
    };
    c.dsigma = [](double u) {
      const double t = std::tanh(u);
      return 0.25 * (1.0 - t * t);
    };
    c.regime = Regime::Lipschitz;
    c.constants = {{"L", 2.25}, {"K_sigma", 1.25}, {"sigma_min", 0.75}};
  } else if (name == "ulogu_bounded_sigma") {
    c.b = ulogu;
    c.sigma = [](double u) { return 1.0 + std::atan(u) / M_PI; };
    c.db = dulogu;
    c.dsigma = [](double u) { return 1.0 / (M_PI * (1.0 + u * u)); };
    c.regime = Regime::LogLipschitz;
    c.constants = {{"c1", 1.0},
                   {"c2", std::exp(-1.0)},
                   {"c3", 1.0},
                   {"c4", 1.0},
                   {"c5", 1.0 + std::log(2.0)},
                   {"L_sigma", 1.0 / M_PI},
                   {"K_sigma", 1.5},
                   {"sigma_min", 0.5}};
  } else {
    throw std::out_of_range("unknown coefficient set '" + name + "'");
  }
  return c;
}

std::vector<std::string> builtin_names() {
  return {"zero_drift_unit_sigma", "linear", "lipschitz_tanh", "ulogu_bounded_sigma"};
}

}  // namespace srde
