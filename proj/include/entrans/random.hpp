#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace entrans {

// Philox4x32-10 counter-based generator (Salmon et al., Random123). Pure
// function of (counter, key): every particle derives its own stream by
// putting its index and step into the counter.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }
};

// Uniform in the open interval (0, 1) from the top 53 bits.
inline double uniformOpen(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) noexcept {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// Uniform pairs for `count` consecutive particles: particle first + i uses
// counter {lo(first + i), hi(first + i), c2, c3} and yields
// a[i] = uniformOpen(r0:r1), b[i] = uniformOpen(r2:r3). Same values as
// Philox4x32::generate, laid out for vectorization.
void philoxUniformPairs(std::uint64_t first, std::size_t count, std::uint32_t c2, std::uint32_t c3,
                        Philox4x32::Key key, double* a, double* b) noexcept;

// Standard normal quantile by Acklam's rational approximation (relative
// error below 1.2e-9 over the whole open interval).
double normalQuantile(double p) noexcept;

// Acklam's central-region rational approximation only, valid for
// p in [0.02425, 0.97575]; no refinement. Branch-free so batches vectorize.
inline double normalQuantileCentral(double p) noexcept {
  constexpr double a1 = -3.969683028665376e+01, a2 = 2.209460984245205e+02, a3 = -2.759285104469687e+02,
                   a4 = 1.383577518672690e+02, a5 = -3.066479806614716e+01, a6 = 2.506628277459239e+00;
  constexpr double b1 = -5.447609879822406e+01, b2 = 1.615858368580409e+02, b3 = -1.556989798598866e+02,
                   b4 = 6.680131188771972e+01, b5 = -1.328068155288572e+01;
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a1 * r + a2) * r + a3) * r + a4) * r + a5) * r + a6) * q /
         (((((b1 * r + b2) * r + b3) * r + b4) * r + b5) * r + 1.0);
}

inline constexpr double kNormalCentralLow = 0.02425;

}  // namespace entrans
