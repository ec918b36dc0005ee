#include <cstdlib>
#include <string_view>

#include "verbatim/audio/kernels.hpp"

namespace verbatim::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::sum_squares_i16, &scalar::lerp_resample_i16};

#if defined(VERBATIM_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::sum_squares_i16, &avx2::lerp_resample_i16};
#endif

#if defined(VERBATIM_HAVE_NEON_KERNELS)
constexpr KernelTable kNeon{Isa::neon, &neon::sum_squares_i16, &scalar::lerp_resample_i16};
#endif

const KernelTable& select() {
  if (const char* forced = std::getenv("VERBATIM_KERNELS")) {
    if (std::string_view(forced) == "scalar") return kScalar;
  }
  if (const auto* t = table_for(Isa::avx2)) return *t;
  if (const auto* t = table_for(Isa::neon)) return *t;
  return kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    default: return "scalar";
  }
}

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
#if defined(VERBATIM_HAVE_AVX2_KERNELS)
      __builtin_cpu_init();
      if (__builtin_cpu_supports("avx2")) return &kAvx2;
#endif
      return nullptr;
    case Isa::neon:
#if defined(VERBATIM_HAVE_NEON_KERNELS)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace verbatim::kernels
