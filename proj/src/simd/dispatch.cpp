#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace osgood::simd {

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(OSGOOD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel variant not available: " + std::string(isa_name(isa)));
  }
#if defined(OSGOOD_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

const KernelTable& active() noexcept {
  static const KernelTable& selected = [] () -> const KernelTable& {
    const char* forced = std::getenv("OSGOOD_ISA");
    if (forced != nullptr && std::string_view(forced) == "scalar") return detail::scalar_table();
    if (isa_available(Isa::Avx2)) return table(Isa::Avx2);
    return detail::scalar_table();
  }();
  return selected;
}

}  // namespace osgood::simd
