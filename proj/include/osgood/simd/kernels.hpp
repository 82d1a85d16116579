#pragma once

// Data-parallel inner loops of the heat-kernel quadratures.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds
// with compiler support, an AVX2/FMA variant. The variant is chosen once at
// first use from the CPU feature bits; `OSGOOD_ISA=scalar` in the environment
// forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace osgood::simd {

enum class Isa { Scalar, Avx2 };

[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;

/// Function table for one instruction-set variant.
struct KernelTable {
  Isa isa;
  /// out[i] = exp(x[i]).
  void (*exp_batch)(const double* x, double* out, std::size_t count);
  /// out[i] = K_dim(r, rho[i], t), the radial heat kernel normalized so that
  /// (S(t)g)(r) = int_0^inf rho^(dim-1) K_dim(r, rho, t) g(rho) drho.
  void (*radial_kernel)(int dim, double r, double t, const double* rho, double* out,
                        std::size_t count);
  /// sum_i a[i] * b[i].
  double (*dot)(const double* a, const double* b, std::size_t count);
};

[[nodiscard]] bool isa_available(Isa isa) noexcept;

/// Table for a specific variant; throws std::invalid_argument if unavailable.
[[nodiscard]] const KernelTable& table(Isa isa);

/// Table selected for this process.
[[nodiscard]] const KernelTable& active() noexcept;

// Convenience wrappers over active().
inline void exp_batch(std::span<const double> x, std::span<double> out) {
  active().exp_batch(x.data(), out.data(), x.size());
}
inline void radial_kernel(int dim, double r, double t, std::span<const double> rho,
                          std::span<double> out) {
  active().radial_kernel(dim, r, t, rho.data(), out.data(), rho.size());
}
[[nodiscard]] inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

/// exp(-x/2) * I0(x/2), the exponentially scaled modified Bessel factor of
/// the planar kernel. Shared by all variants.
[[nodiscard]] double scaled_bessel_i0_half(double x);

/// K_dim(r, r + u, t) with the Gaussian factor taken from the offset u, which
/// stays exact when sqrt(t) is far below the rounding error of r.
[[nodiscard]] double radial_kernel_offset(int dim, double r, double u, double t);

}  // namespace osgood::simd
