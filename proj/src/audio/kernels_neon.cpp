#include <arm_neon.h>

#include "verbatim/audio/kernels.hpp"

namespace verbatim::kernels::neon {

std::int64_t sum_squares_i16(const std::int16_t* src, std::size_t n) {
  int64x2_t acc = vdupq_n_s64(0);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const int16x8_t v = vld1q_s16(src + i);
    const int32x4_t lo = vmull_s16(vget_low_s16(v), vget_low_s16(v));
    const int32x4_t hi = vmull_high_s16(v, v);
    acc = vpadalq_s32(acc, lo);
    acc = vpadalq_s32(acc, hi);
  }
  return vaddvq_s64(acc) + scalar::sum_squares_i16(src + i, n - i);
}

}  // namespace verbatim::kernels::neon
