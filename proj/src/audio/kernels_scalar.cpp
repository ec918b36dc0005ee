#include <cmath>

#include "verbatim/audio/kernels.hpp"

namespace verbatim::kernels::scalar {

std::int64_t sum_squares_i16(const std::int16_t* src, std::size_t n) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t x = src[i];
    acc += static_cast<std::int64_t>(x * x);
  }
  return acc;
}

void lerp_resample_i16(const std::int16_t* src, std::size_t n, double step, std::int16_t* dst,
                       std::size_t m) {
  if (n == 0) {
    for (std::size_t i = 0; i < m; ++i) dst[i] = 0;
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double pos = static_cast<double>(i) * step;
    const double base = std::floor(pos);
    const auto p = static_cast<std::size_t>(base);
    if (p + 1 >= n) {
      dst[i] = src[n - 1];
      continue;
    }
    const double frac = pos - base;
    const double a = src[p];
    const double b = src[p + 1];
    dst[i] = static_cast<std::int16_t>(std::nearbyint(a + (b - a) * frac));
  }
}

}  // namespace verbatim::kernels::scalar
