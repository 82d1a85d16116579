#pragma once

#include <cmath>

#include "osgood/simd/kernels.hpp"

namespace osgood::simd::detail {

const KernelTable& scalar_table() noexcept;
#if defined(OSGOOD_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Normalization of K_dim in front of the Gaussian factor.
inline double kernel_prefactor(int dim, double t) {
  switch (dim) {
    case 1: return 1.0 / std::sqrt(4.0 * kPi * t);
    case 2: return 2.0 * kPi / (4.0 * kPi * t);
    default: {
      const double s = std::sqrt(4.0 * kPi * t);
      return 4.0 * kPi / (s * s * s);
    }
  }
}

}  // namespace osgood::simd::detail
