#pragma once

// Data-parallel inner loops over 16-bit PCM.
//
// Every kernel has a scalar reference implementation; vector variants must
// produce bit-identical results (integer kernels are exact, floating-point
// kernels use the same operation order and round-half-even). The active table is
// chosen once per process from the CPU's capabilities; setting
// VERBATIM_KERNELS=scalar forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace verbatim::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  /// Σ x² over n samples; exact for any n < 2^33.
  std::int64_t (*sum_squares_i16)(const std::int16_t* src, std::size_t n);
  /// dst[i] = lerp(src, i·step), clamped to the last sample past the end, rounded half-even.
  void (*lerp_resample_i16)(const std::int16_t* src, std::size_t n, double step,
                            std::int16_t* dst, std::size_t m);
};

const KernelTable& scalar_table();
/// Table for `isa` when compiled in and supported by this CPU, else nullptr.
const KernelTable* table_for(Isa isa);
const KernelTable& active();

inline std::int64_t sum_squares(std::span<const std::int16_t> src) {
  return active().sum_squares_i16(src.data(), src.size());
}

inline void lerp_resample(std::span<const std::int16_t> src, double step,
                          std::span<std::int16_t> dst) {
  active().lerp_resample_i16(src.data(), src.size(), step, dst.data(), dst.size());
}

namespace scalar {
std::int64_t sum_squares_i16(const std::int16_t* src, std::size_t n);
void lerp_resample_i16(const std::int16_t* src, std::size_t n, double step, std::int16_t* dst,
                       std::size_t m);
}  // namespace scalar

#if defined(VERBATIM_HAVE_AVX2_KERNELS)
namespace avx2 {
std::int64_t sum_squares_i16(const std::int16_t* src, std::size_t n);
void lerp_resample_i16(const std::int16_t* src, std::size_t n, double step, std::int16_t* dst,
                       std::size_t m);
}  // namespace avx2
#endif

#if defined(VERBATIM_HAVE_NEON_KERNELS)
namespace neon {
std::int64_t sum_squares_i16(const std::int16_t* src, std::size_t n);
}  // namespace neon
#endif

}  // namespace verbatim::kernels
