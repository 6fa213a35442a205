#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "srde/errors.hpp"

namespace srde {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (positive half; node 0 last).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights matched to the odd Kronrod nodes (indices 1,3,5,7).
inline constexpr double kG7Weights[4] = {0.129484966168870, 0.279705391489277,
                                         0.381830050505119, 0.417959183673469};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double k = kGK15Weights[7] * fc;
  double g = kG7Weights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double fv = f(c - h * kGK15Nodes[i]) + f(c + h * kGK15Nodes[i]);
    k += kGK15Weights[i] * fv;
    if (i % 2 == 1) g += kG7Weights[i / 2] * fv;
  }
  kronrod = k * h;
  err = std::abs((k - g) * h);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 7-15 on [a,b] with bisection refinement.
template <typename F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol = 1e-10,
                                    int max_panels = 4000) {
  struct Panel {
    double a, b, value, err;
  };
  std::vector<Panel> panels;
  double v, e;
  detail::gk15(f, a, b, v, e);
  panels.push_back({a, b, v, e});
  int used = 1;
  while (used < max_panels) {
    // refine the worst panel
    std::size_t worst = 0;
    double total_err = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total_err += panels[i].err;
      if (panels[i].err > panels[worst].err) worst = i;
    }
    if (total_err <= abs_tol) break;
    Panel p = panels[worst];
    double m = 0.5 * (p.a + p.b);
    Panel left, right;
    left.a = p.a;
    left.b = m;
    right.a = m;
    right.b = p.b;
    detail::gk15(f, left.a, left.b, left.value, left.err);
    detail::gk15(f, right.a, right.b, right.value, right.err);
    panels[worst] = left;
    panels.push_back(right);
    ++used;
  }
  QuadratureResult out;
  for (const auto& p : panels) {
    out.value += p.value;
    out.error_estimate += p.err;
  }
  out.panels = used;
  out.converged = out.error_estimate <= abs_tol;
  return out;
}

/// As integrate_adaptive, but throws NumericalError when the tolerance is not met.
template <typename F>
double integrate_or_throw(const F& f, double a, double b, double abs_tol = 1e-10,
                          int max_panels = 4000) {
  auto r = integrate_adaptive(f, a, b, abs_tol, max_panels);
  if (!r.converged)
    throw NumericalError("quadrature did not converge on [" + std::to_string(a) + "," +
                         std::to_string(b) + "]: error estimate " +
                         std::to_string(r.error_estimate) + " after " +
                         std::to_string(r.panels) + " panels");
  return r.value;
}

/// Integral over [a,b] split at interior break points (integrand kinks).
template <typename F>
double integrate_split(const F& f, double a, double b, const std::vector<double>& breaks,
                       double abs_tol = 1e-10) {
  std::vector<double> pts = {a, b};
  for (double s : breaks)
    if (s > a && s < b) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += integrate_or_throw(f, pts[i], pts[i + 1], abs_tol / (pts.size() - 1));
  return total;
}

}  // namespace srde
