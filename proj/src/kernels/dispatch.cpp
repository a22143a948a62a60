#include <cstdlib>
#include <string_view>

#include "toomlab/error.hpp"
#include "toomlab/kernels.hpp"

namespace toomlab::kernels {

#ifdef TOOMLAB_HAVE_AVX2
namespace detail {
const KernelSet& avx2_set();
}
#endif

const KernelSet* avx2() {
#if defined(TOOMLAB_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_set() : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelSet*> available() {
  std::vector<const KernelSet*> out{&scalar()};
  if (const auto* v = avx2()) out.push_back(v);
  return out;
}

const KernelSet& active() {
  static const KernelSet& chosen = [] () -> const KernelSet& {
    const char* env = std::getenv("TOOMLAB_KERNELS");
    const std::string_view want = env ? env : "";
    if (want == "scalar") return scalar();
    if (want == "avx2") {
      if (const auto* v = avx2()) return *v;
      throw ConfigError("TOOMLAB_KERNELS=avx2 requested but AVX2 is unavailable");
    }
    if (!want.empty()) throw ConfigError("unknown TOOMLAB_KERNELS value '" + std::string(want) + "'");
    if (const auto* v = avx2()) return *v;
    return scalar();
  }();
  return chosen;
}

}  // namespace toomlab::kernels
