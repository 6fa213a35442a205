#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "srde/errors.hpp"

namespace srde {

/// Spatial profile sampled on the grid points of a GridSpec.
using Field = Eigen::ArrayXd;

/// Time-indexed family of profiles; row k is the field at time k*dt,
/// rows run 0..n_t inclusive.
using Trajectory = Eigen::ArrayXXd;

/// Space-time discretization of [0,T] x [-L,L], the truncated stand-in for
/// [0,T] x R. Space is periodic with period 2L and nodes x_i = -L + i*dx,
/// i = 0..n_x-1; time nodes are t_k = k*dt, k = 0..n_t.
struct GridSpec {
  double T = 1.0;
  int n_t = 1024;
  double half_width = 8.0;
  int n_x = 256;
  bool periodic_extension = true;

  double dt() const { return T / n_t; }
  double dx() const { return 2.0 * half_width / n_x; }

  double t(int k) const { return k * dt(); }
  double x(int i) const { return -half_width + i * dx(); }

  Eigen::ArrayXd x_nodes() const {
    return Eigen::ArrayXd::LinSpaced(n_x, -half_width, half_width - dx());
  }

  /// Heat-kernel mass outside [-L, L] for a centered source at the final time.
  double kernel_tail_mass() const {
    return std::erfc(half_width / std::sqrt(2.0 * T));
  }

  void validate(double tail_tol = 1e-8) const {
    if (!(T > 0.0) || n_t < 1) throw std::domain_error("grid: need T > 0 and n_t >= 1");
    if (!(half_width > 0.0) || n_x < 2) throw std::domain_error("grid: need L > 0 and n_x >= 2");
    if (kernel_tail_mass() > tail_tol)
      throw std::domain_error("grid: kernel tail mass outside [-L,L] exceeds tolerance");
  }

  bool operator==(const GridSpec& o) const {
    return T == o.T && n_t == o.n_t && half_width == o.half_width && n_x == o.n_x &&
           periodic_extension == o.periodic_extension;
  }
};

inline void require_field_shape(const Field& f, const GridSpec& grid, const char* what) {
  if (f.size() != grid.n_x)
    throw ShapeError(std::string(what) + ": field size does not match grid");
}

inline void require_trajectory_shape(const Trajectory& F, const GridSpec& grid,
                                     const char* what) {
  if (F.rows() != grid.n_t + 1 || F.cols() != grid.n_x)
    throw ShapeError(std::string(what) + ": trajectory shape does not match grid");
}

}  // namespace srde
