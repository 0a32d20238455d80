#include <cstdlib>
#include <string_view>

#include "hyperocc/kernels.hpp"

namespace hyperocc::kernels {

#if defined(HYPEROCC_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2() {
#if defined(HYPEROCC_HAVE_AVX2_KERNELS)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* forced = std::getenv("HYPEROCC_KERNELS");
    if (forced && std::string_view(forced) == "scalar") return scalar();
    if (const KernelTable* t = avx2()) return *t;
    return scalar();
  }();
  return chosen;
}

}  // namespace hyperocc::kernels
