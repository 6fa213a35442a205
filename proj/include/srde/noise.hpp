#pragma once

#include <cstdint>

#include "srde/grid.hpp"
#include "srde/heat_kernel.hpp"

namespace srde {

/// Grid realization of space-time white noise: independent increments
/// ~ Normal(0, dt*dx), one per (time cell, space cell). Fully determined by
/// (seed, stream); any cell can be regenerated out of order.
struct NoiseRealization {
  GridSpec grid;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Eigen::ArrayXXd increments;  // n_t rows, n_x cols
};

/// Increment row for time cell k, written without materializing the whole
/// sheet (identical values to the corresponding NoiseRealization row).
void noise_row(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream, int k,
               Field& out);

NoiseRealization sample_noise(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream);

/// Accumulated kernel-smoothed noise: V_0 = 0 and
///   V_{k+1} = P_dt( V_k + sigma_k .* dW_k / dx ),
/// the noise entering as a piecewise-constant density over each cell that is
/// immediately smoothed over one step. sigma_values rows 0..n_t are the factor
/// evaluated along a trajectory; row k multiplies the increment of cell k.
Trajectory stochastic_convolution(const Trajectory& sigma_values,
                                  const NoiseRealization& noise);

}  // namespace srde
