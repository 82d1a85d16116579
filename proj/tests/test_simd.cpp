#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "osgood/simd/kernels.hpp"

using namespace osgood::simd;

namespace {

double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("scalar table is always available and active table is one of the variants") {
  CHECK(isa_available(Isa::Scalar));
  const KernelTable& t = active();
  CHECK((t.isa == Isa::Scalar || t.isa == Isa::Avx2));
  CHECK(isa_name(Isa::Avx2) == "avx2");
}

TEST_CASE("exp_batch: vector variant matches scalar reference") {
  if (!isa_available(Isa::Avx2)) return;
  const KernelTable& ref = table(Isa::Scalar);
  const KernelTable& vec = table(Isa::Avx2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-745.0, 709.0);
  std::vector<double> x(1003);
  for (double& v : x) v = dist(rng);
  x[0] = 0.0;
  x[1] = -800.0;
  x[2] = -1e-300;
  x[3] = -30.0;
  std::vector<double> a(x.size()), b(x.size());
  ref.exp_batch(x.data(), a.data(), x.size());
  vec.exp_batch(x.data(), b.data(), x.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (a[i] < 1e-300) {
      CHECK(b[i] <= 1e-300);
      continue;
    }
    worst = std::max(worst, rel_diff(a[i], b[i]));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("radial_kernel: vector variant matches scalar reference in every dimension") {
  if (!isa_available(Isa::Avx2)) return;
  const KernelTable& ref = table(Isa::Scalar);
  const KernelTable& vec = table(Isa::Avx2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int dim = 1; dim <= 3; ++dim) {
    for (double t : {1e-6, 1e-3, 0.1, 1.0}) {
      for (double r : {0.0, 1e-5, 0.3, 1.0, 2.5}) {
        std::vector<double> rho(37);
        for (double& v : rho) v = 3.0 * u(rng);
        rho[0] = r;
        std::vector<double> a(rho.size()), b(rho.size());
        ref.radial_kernel(dim, r, t, rho.data(), a.data(), rho.size());
        vec.radial_kernel(dim, r, t, rho.data(), b.data(), rho.size());
        double peak = 0.0;
        for (double v : a) peak = std::max(peak, v);
        for (std::size_t i = 0; i < rho.size(); ++i) {
          CHECK(std::abs(a[i] - b[i]) <= 1e-13 * std::max(std::abs(a[i]), 1e-300 + 1e-16 * peak));
        }
      }
    }
  }
}

TEST_CASE("dot: vector variant matches scalar reference for all tail lengths") {
  if (!isa_available(Isa::Avx2)) return;
  const KernelTable& ref = table(Isa::Scalar);
  const KernelTable& vec = table(Isa::Avx2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t len = 0; len < 40; ++len) {
    std::vector<double> a(len), b(len);
    double scale = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      scale += a[i] * b[i];
    }
    CHECK(std::abs(ref.dot(a.data(), b.data(), len) - vec.dot(a.data(), b.data(), len)) <=
          1e-14 * std::max(scale, 1.0));
  }
}

TEST_CASE("radial kernel integrates to one against the radial measure") {
  // int_0^inf rho^(n-1) K_n(r, rho, t) drho = 1 away from the origin boundary.
  const double t = 0.01;
  const double r = 1.0;
  for (int dim = 1; dim <= 3; ++dim) {
    const std::size_t count = 20001;
    std::vector<double> rho(count), k(count);
    const double h = 2.0 / (count - 1);
    for (std::size_t i = 0; i < count; ++i) rho[i] = i * h;
    radial_kernel(dim, r, t, rho, k);
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double w = (i == 0 || i + 1 == count) ? 0.5 : 1.0;
      sum += w * std::pow(rho[i], dim - 1) * k[i];
    }
    CHECK(sum * h == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("offset kernel agrees with the direct kernel when resolvable") {
  for (int dim = 1; dim <= 3; ++dim) {
    for (double u : {-0.05, -0.01, 0.0, 0.02}) {
      const double r = 0.7;
      const double t = 1e-3;
      double direct = 0.0;
      const double rho = r + u;
      table(Isa::Scalar).radial_kernel(dim, r, t, &rho, &direct, 1);
      CHECK(radial_kernel_offset(dim, r, u, t) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("scaled Bessel factor limits") {
  CHECK(scaled_bessel_i0_half(0.0) == doctest::Approx(1.0));
  // exp(-z) I0(z) ~ 1 / sqrt(2 pi z) for large z.
  const double z = 1e6;
  CHECK(scaled_bessel_i0_half(2.0 * z) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * z)).epsilon(1e-6));
}
