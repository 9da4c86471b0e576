#include "entrans/random.hpp"

#include <cmath>

namespace entrans {

double normalQuantile(double p) noexcept {
  constexpr double c1 = -7.784894002430293e-03, c2 = -3.223964580411365e-01, c3 = -2.400758277161838e+00,
                   c4 = -2.549732539343734e+00, c5 = 4.374664141464968e+00, c6 = 2.938163982698783e+00;
  constexpr double d1 = 7.784695709041462e-03, d2 = 3.224671290700398e-01, d3 = 2.445134137142996e+00,
                   d4 = 3.754408661907416e+00;
  if (p >= kNormalCentralLow && p <= 1.0 - kNormalCentralLow) return normalQuantileCentral(p);
  const bool upper = p > 0.5;
  const double q = std::sqrt(-2.0 * std::log(upper ? 1.0 - p : p));
  const double x = (((((c1 * q + c2) * q + c3) * q + c4) * q + c5) * q + c6) / ((((d1 * q + d2) * q + d3) * q + d4) * q + 1.0);
  return upper ? -x : x;
}

void philoxUniformPairs(std::uint64_t first, std::size_t count, std::uint32_t c2, std::uint32_t c3,
                        Philox4x32::Key key, double* a, double* b) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t particle = first + i;
    std::uint32_t x0 = static_cast<std::uint32_t>(particle);
    std::uint32_t x1 = static_cast<std::uint32_t>(particle >> 32);
    std::uint32_t x2 = c2;
    std::uint32_t x3 = c3;
    std::uint32_t k0 = key[0];
    std::uint32_t k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * x0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * x2;
      const std::uint32_t y0 = static_cast<std::uint32_t>(p1 >> 32) ^ x1 ^ k0;
      const std::uint32_t y1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t y2 = static_cast<std::uint32_t>(p0 >> 32) ^ x3 ^ k1;
      const std::uint32_t y3 = static_cast<std::uint32_t>(p0);
      x0 = y0;
      x1 = y1;
      x2 = y2;
      x3 = y3;
      k0 += kW0;
      k1 += kW1;
    }
    a[i] = uniformOpen(join(x0, x1));
    b[i] = uniformOpen(join(x2, x3));
  }
}

}  // namespace entrans
