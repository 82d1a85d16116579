#include <cmath>

#include "kernels_impl.hpp"

namespace osgood::simd {

double scaled_bessel_i0_half(double x) {
  const double z = 0.5 * x;
  if (z < 25.0) return std::cyl_bessel_i(0.0, z) * std::exp(-z);
  // Large-argument expansion; terms keep shrinking well past k = 20 here.
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 20; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd / (8.0 * z * k);
    sum += term;
  }
  return sum / std::sqrt(2.0 * detail::kPi * z);
}

double radial_kernel_offset(int dim, double r, double u, double t) {
  const double rho = r + u;
  const double g = std::exp(-u * u / (4.0 * t));
  const double x = r * rho / t;
  double a;
  switch (dim) {
    case 1: a = 1.0 + std::exp(-x); break;
    case 2: a = scaled_bessel_i0_half(x); break;
    default: a = x > 0.0 ? -std::expm1(-x) / x : 1.0; break;
  }
  return detail::kernel_prefactor(dim, t) * g * a;
}

namespace {

void exp_batch_scalar(const double* x, double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(x[i]);
}

void radial_kernel_scalar(int dim, double r, double t, const double* rho, double* out,
                          std::size_t count) {
  const double pref = detail::kernel_prefactor(dim, t);
  const double inv4t = 1.0 / (4.0 * t);
  for (std::size_t i = 0; i < count; ++i) {
    const double d = r - rho[i];
    const double g = std::exp(-d * d * inv4t);
    const double x = r * rho[i] / t;
    double a;
    switch (dim) {
      case 1: a = 1.0 + std::exp(-x); break;
      case 2: a = scaled_bessel_i0_half(x); break;
      default: a = x > 0.0 ? -std::expm1(-x) / x : 1.0; break;
    }
    out[i] = pref * g * a;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelTable& detail::scalar_table() noexcept {
  static const KernelTable table{Isa::Scalar, &exp_batch_scalar, &radial_kernel_scalar,
                                 &dot_scalar};
  return table;
}

}  // namespace osgood::simd
