#include <immintrin.h>

#include <cmath>

#include "verbatim/audio/kernels.hpp"

namespace verbatim::kernels::avx2 {

std::int64_t sum_squares_i16(const std::int16_t* src, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    // Each pair sum lies in [0, 2^31]: exact as u32 even when it wraps as i32.
    const __m256i pairs = _mm256_madd_epi16(v, v);
    const __m256i lo = _mm256_cvtepu32_epi64(_mm256_castsi256_si128(pairs));
    const __m256i hi = _mm256_cvtepu32_epi64(_mm256_extracti128_si256(pairs, 1));
    acc = _mm256_add_epi64(acc, _mm256_add_epi64(lo, hi));
  }
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::int64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  return total + scalar::sum_squares_i16(src + i, n - i);
}

void lerp_resample_i16(const std::int16_t* src, std::size_t n, double step, std::int16_t* dst,
                       std::size_t m) {
  if (n < 2) {
    scalar::lerp_resample_i16(src, n, step, dst, m);
    return;
  }
  const __m256d stepv = _mm256_set1_pd(step);
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const double d = static_cast<double>(i);
    const __m256d index = _mm256_set_pd(d + 3.0, d + 2.0, d + 1.0, d);
    const __m256d pos = _mm256_mul_pd(index, stepv);
    const __m256d base = _mm256_floor_pd(pos);
    // Lanes are increasing; once the last one needs src[n] the scalar tail takes over.
    alignas(32) double bases[4];
    _mm256_store_pd(bases, base);
    if (bases[3] + 1.0 >= static_cast<double>(n)) break;

    const __m128i idx = _mm256_cvttpd_epi32(base);
    // One 32-bit gather per lane fetches src[p] (low half) and src[p + 1] (high half).
    const __m128i both = _mm_i32gather_epi32(reinterpret_cast<const int*>(src), idx, 2);
    const __m128i a32 = _mm_srai_epi32(_mm_slli_epi32(both, 16), 16);
    const __m128i b32 = _mm_srai_epi32(both, 16);
    const __m256d a = _mm256_cvtepi32_pd(a32);
    const __m256d b = _mm256_cvtepi32_pd(b32);
    const __m256d frac = _mm256_sub_pd(pos, base);
    const __m256d v = _mm256_add_pd(a, _mm256_mul_pd(_mm256_sub_pd(b, a), frac));
    const __m256d r = _mm256_round_pd(v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m128i r32 = _mm256_cvtpd_epi32(r);
    _mm_storel_epi64(reinterpret_cast<__m128i*>(dst + i), _mm_packs_epi32(r32, r32));
  }
  for (; i < m; ++i) {
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

}  // namespace verbatim::kernels::avx2
