#include "sparse_forge/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace sparse_forge {

#if defined(SPARSE_FORGE_HAVE_AVX2)
namespace detail {
const ComboKernels* avx2_table() noexcept;
}
#endif

const ComboKernels* avx2_kernels() noexcept {
#if defined(SPARSE_FORGE_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const ComboKernels& active_kernels() noexcept {
  static const ComboKernels* chosen = [] {
    const char* env = std::getenv("SPARSE_FORGE_KERNELS");
    if (env && std::string_view(env) == "scalar") return &scalar_kernels();
    const ComboKernels* v = avx2_kernels();
    return v ? v : &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace sparse_forge
