#include <cstdlib>
#include <cstring>

#include "roughscat/simd/kernels.hpp"

namespace roughscat::simd {

#if defined(ROUGHSCAT_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(ROUGHSCAT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* env = std::getenv("ROUGHSCAT_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::kScalar;
    return avx2_kernels() ? Isa::kAvx2 : Isa::kScalar;
  }();
  return isa;
}

const KernelTable& kernels() { return active_isa() == Isa::kAvx2 ? *avx2_kernels() : scalar_kernels(); }

std::string isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

}  // namespace roughscat::simd
