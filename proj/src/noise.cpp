#include "srde/noise.hpp"

#include <cmath>

#include "srde/rng.hpp"

namespace srde {

void noise_row(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream, int k,
               Field& out) {
  out.resize(grid.n_x);
  const double sd = std::sqrt(grid.dt() * grid.dx());
  const std::uint64_t hi = static_cast<std::uint64_t>(k);
  for (int i = 0; i + 1 < grid.n_x; i += 2) {
    double z0, z1;
    normal_pair(seed, stream, hi, static_cast<std::uint64_t>(i / 2), z0, z1);
    out[i] = sd * z0;
    out[i + 1] = sd * z1;
  }
  if (grid.n_x % 2 == 1) {
    double z0, z1;
    normal_pair(seed, stream, hi, static_cast<std::uint64_t>(grid.n_x / 2), z0, z1);
    out[grid.n_x - 1] = sd * z0;
  }
}

NoiseRealization sample_noise(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream) {
  grid.validate();
  NoiseRealization n;
  n.grid = grid;
  n.seed = seed;
  n.stream = stream;
  n.increments.resize(grid.n_t, grid.n_x);
  Field row;
  for (int k = 0; k < grid.n_t; ++k) {
    noise_row(grid, seed, stream, k, row);
    n.increments.row(k) = row.transpose();
  }
  return n;
}

Trajectory stochastic_convolution(const Trajectory& sigma_values,
                                  const NoiseRealization& noise) {
  const GridSpec& grid = noise.grid;
  require_trajectory_shape(sigma_values, grid, "stochastic_convolution");
  if (noise.increments.rows() != grid.n_t || noise.increments.cols() != grid.n_x)
    throw ShapeError("stochastic_convolution: noise does not match its grid");

  Semigroup sg(grid);
  auto step = sg.stepper(grid.dt());
  const double inv_dx = 1.0 / grid.dx();

  Trajectory v(grid.n_t + 1, grid.n_x);
  v.row(0).setZero();
  Field state = Field::Zero(grid.n_x);
  for (int k = 0; k < grid.n_t; ++k) {
    state += sigma_values.row(k).transpose() * noise.increments.row(k).transpose() * inv_dx;
    step.apply_inplace(state);
    v.row(k + 1) = state.transpose();
  }
  return v;
}

}  // namespace srde
