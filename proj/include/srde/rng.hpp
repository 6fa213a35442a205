#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace srde {

/// Philox4x32-10 counter-based generator. A (key, counter) pair maps to four
/// independent 32-bit words, so any (seed, stream, step, block) coordinate can
/// be evaluated out of order; Monte Carlo output is then independent of worker
/// scheduling.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  /// (stream, ctr_hi, ctr_lo) occupy disjoint counter words, so distinct
  /// coordinates can never collide; stream and ctr_hi must stay below 2^32.
  static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                            std::uint64_t ctr_hi, std::uint64_t ctr_lo) {
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    std::array<std::uint32_t, 4> c = {
        static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
        static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(stream)};
    for (int round = 0; round < 10; ++round) {
      std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
      std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
      std::array<std::uint32_t, 4> next = {
          static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0, static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1, static_cast<std::uint32_t>(p0)};
      c = next;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return c;
  }
};

/// Uniform in (0,1); never returns 0 or 1.
inline double u64_to_unit(std::uint64_t v) {
  return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

/// Two standard normals from one Philox block (Box-Muller).
inline void normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr_hi,
                        std::uint64_t ctr_lo, double& z0, double& z1) {
  auto w = Philox4x32::block(seed, stream, ctr_hi, ctr_lo);
  double u1 = u64_to_unit((static_cast<std::uint64_t>(w[0]) << 32) | w[1]);
  double u2 = u64_to_unit((static_cast<std::uint64_t>(w[2]) << 32) | w[3]);
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  z0 = r * std::cos(a);
  z1 = r * std::sin(a);
}

/// Single uniform in (0,1) at a counter coordinate.
inline double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr_hi,
                         std::uint64_t ctr_lo) {
  auto w = Philox4x32::block(seed, stream, ctr_hi, ctr_lo);
  return u64_to_unit((static_cast<std::uint64_t>(w[0]) << 32) | w[1]);
}

/// Convenience sequential view over the counter space, for sampling routines
/// that just need a stream of variates.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t domain = 0)
      : seed_(seed), stream_(stream), hi_(domain), idx_(0) {}

  double uniform() { return uniform_at(seed_, stream_, hi_, idx_++); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double z0, z1;
    normal_pair(seed_, stream_, hi_, idx_++, z0, z1);
    spare_ = z1;
    have_spare_ = true;
    return z0;
  }

  /// Uniform on [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Log-uniform magnitude in [lo, hi] with random sign.
  double signed_log_uniform(double lo, double hi) {
    double m = lo * std::exp(uniform() * std::log(hi / lo));
    return uniform() < 0.5 ? -m : m;
  }

private:
  std::uint64_t seed_, stream_, hi_, idx_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace srde
