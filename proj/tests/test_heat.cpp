#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "osgood/errors.hpp"
#include "osgood/heat_semigroup.hpp"

using namespace osgood;

namespace {

constexpr double kPi = 3.14159265358979323846;

SingularData line_data() { return SingularData{0.875, 2.0, 1, std::nullopt}; }

RadialProfile gaussian_profile(int n, double h, double r_max) {
  RadialProfile p;
  p.n = n;
  for (double r = 0.0; r < r_max + 0.5 * h; r += h) p.nodes.push_back(r);
  for (double r : p.nodes) p.values.push_back(std::exp(-r * r));
  p.tail_bound = std::exp(-r_max * r_max);
  return p;
}

}  // namespace

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(semigroup_constants(3).sphere_area == doctest::Approx(4.0 * kPi));
}

TEST_CASE("singular data validation and mass") {
  CHECK_THROWS_AS(SingularData({1.0, 2.0, 1, std::nullopt}).validate(), ParameterViolation);
  CHECK_THROWS_AS(SingularData({0.5, 1.0, 1, std::nullopt}).validate(), ParameterViolation);
  CHECK_THROWS_AS(SingularData({0.6, 2.0, 1, 2.0}).validate(), ParameterViolation);
  CHECK_THROWS_AS(SingularData({0.5, 2.0, 4, std::nullopt}).validate(), ParameterViolation);
  CHECK(SingularData({2.0, 2.0, 3, std::nullopt}).mass() == doctest::Approx(8.0 * kPi));
  CHECK(line_data().u0(1.0) == 1.0);
  CHECK(line_data().u0(2.5) == 0.0);
}

TEST_CASE("initial condition is recovered at small times") {
  const SingularData d = line_data();
  CHECK(std::abs(eval_w(d, 1.0, 1e-6, 1e-10) - 1.0) < 1e-3);
  CHECK(eval_w(d, 0.5, 1e-8, 1e-10) == doctest::Approx(std::pow(0.5, -0.875)).epsilon(1e-5));
  CHECK(eval_w(d, 1.0, 1e-20, 1e-10) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)eval_w(d, 1.0, 0.0, 1e-8), DomainError);
}

TEST_CASE("w is radially nonincreasing and maximal at the origin") {
  for (const SingularData& d : {line_data(), SingularData{1.2, 2.0, 2, std::nullopt},
                                SingularData{2.0, 2.0, 3, std::nullopt}}) {
    for (double t : {1e-3, 0.1, 1.0}) {
      double prev = eval_w(d, 0.0, t, 1e-10);
      const double top = prev;
      for (double r = 0.05; r < 4.0; r += 0.137) {
        const double w = eval_w(d, r, t, 1e-10);
        CHECK(w <= prev * (1.0 + 1e-9));
        CHECK(w <= top * (1.0 + 1e-9));
        prev = w;
      }
    }
  }
}

TEST_CASE("capped data gives a smaller evolution") {
  const SingularData d = line_data();
  for (double cap : {1.0, 3.0, 50.0}) {
    for (double r : {0.0, 0.3, 1.0, 2.0}) {
      CHECK(eval_w(d, r, 0.01, 1e-10, cap) <= eval_w(d, r, 0.01, 1e-10) * (1.0 + 1e-10));
    }
  }
  CHECK(eval_w(d, 0.0, 1e-3, 1e-10, 2.0) <= 2.0 * (1.0 + 1e-10));
}

TEST_CASE("mass is conserved") {
  const SingularData d{2.0, 2.0, 3, std::nullopt};
  const MassEstimate m = mass_of_w(d, 0.1, 1e-9);
  CHECK(std::abs(m.total() - 8.0 * kPi) <= 1e-6 * 8.0 * kPi);
  CHECK(m.tail_bound >= 0.0);
}

TEST_CASE("M is a lower bound in (0, 1]") {
  const SingularData d = line_data();
  const MEstimate m = compute_M_detailed(d);
  CHECK(m.M > 0.0);
  CHECK(m.M <= 1.0);
  CHECK(m.M <= eval_w(d, 1.0, 1.0, 1e-10));
  CHECK(m.M <= m.scan_min);
  CHECK(m.limit_verified);
  CHECK(std::abs(compute_M(d, 1e-7) - m.M) < 1e-6);
  CHECK_THROWS_AS((void)compute_M(d, 0.1), DomainError);
}

TEST_CASE("scaling inequality") {
  const SingularData d = line_data();
  const ScalingCheck at1 = scaling_inequality_check(d, 0.45, 1.0, 1e-9);
  CHECK(std::abs(at1.margin) < 1e-12);
  CHECK(at1.holds);
  const ScalingCheck small = scaling_inequality_check(d, 0.45, 0.01, 1e-9);
  CHECK(small.holds);
  CHECK(small.margin > 0.0);
  CHECK_THROWS_AS((void)scaling_inequality_check(d, 0.5, 0.1, 1e-9), DomainError);
}

TEST_CASE("radial grid contains required radii") {
  GridSpec g;
  g.r_min = 1e-4;
  g.r_max = 5.0;
  g.required = {1.0, 2.0, 0.0317};
  const std::vector<double> nodes = make_radial_grid(g);
  CHECK(nodes.front() == 0.0);
  CHECK(nodes.back() == 5.0);
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  CHECK(std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end());
  for (double r : g.required) CHECK(std::find(nodes.begin(), nodes.end(), r) != nodes.end());
}

TEST_CASE("sampled profile at t = 0 flags the singular origin") {
  const SingularData d = line_data();
  const std::vector<double> nodes = {0.0, 0.1, 1.0, 3.0};
  const RadialProfile p = sample_w(d, nodes, 0.0, 1e-8);
  CHECK(p.singular_origin);
  CHECK(p.values[0] == p.values[1]);
  CHECK(p.values[3] == 0.0);
  CHECK(p(0.55) == doctest::Approx(0.5 * (p.values[1] + p.values[2])));
  CHECK(p(4.0) == 0.0);
}

TEST_CASE("gaussian tail fraction") {
  CHECK(gaussian_tail_fraction(1, 0.0, 1.0) == doctest::Approx(1.0));
  // n = 1: P(|x| > d) for x ~ N(0, 2 dt) = erfc(d / sqrt(4 dt)).
  CHECK(gaussian_tail_fraction(1, 1.0, 0.1) == doctest::Approx(std::erfc(1.0 / std::sqrt(0.4))));
}

TEST_CASE("semigroup on a Gaussian profile matches the exact evolution") {
  for (int n = 1; n <= 3; ++n) {
    const RadialProfile g = gaussian_profile(n, 0.004, 7.0);
    const double dt = 0.05;
    const RadialProfile one = apply_semigroup(g, dt, 1e-8);
    const double s = 1.0 + 4.0 * dt;
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size() && g.nodes[j] < 3.5; ++j) {
      const double r = g.nodes[j];
      worst = std::max(worst, std::abs(one.values[j] - std::pow(s, -0.5 * n) * std::exp(-r * r / s)));
    }
    CHECK(worst < 1e-5);
    CHECK(one.time == doctest::Approx(dt));
  }
}

TEST_CASE("two half steps agree with one full step") {
  const RadialProfile g = gaussian_profile(1, 0.004, 7.0);
  const double tol = 1e-5;
  const RadialProfile once = apply_semigroup(g, 0.1, tol);
  const RadialProfile twice = apply_semigroup(apply_semigroup(g, 0.05, tol), 0.05, tol);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size() && g.nodes[j] < 3.5; ++j) {
    worst = std::max(worst, std::abs(once.values[j] - twice.values[j]));
  }
  CHECK(worst <= 2.0 * tol);
}

TEST_CASE("constant profile stays constant away from the grid edge") {
  for (int n = 1; n <= 3; ++n) {
    RadialProfile c;
    c.n = n;
    for (double r = 0.0; r <= 20.0 + 1e-12; r += 0.01) {
      c.nodes.push_back(r);
      c.values.push_back(2.5);
    }
    c.tail_bound = 0.0;
    const RadialProfile out = apply_semigroup(c, 0.1, 1e-8);
    for (std::size_t j = 0; j < c.size() && c.nodes[j] <= 10.0; ++j) {
      CHECK(out.values[j] == doctest::Approx(2.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("tiny time step returns the input profile") {
  const RadialProfile g = gaussian_profile(2, 0.01, 6.0);
  const RadialProfile out = apply_semigroup(g, 1e-9, 1e-8);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(out.values[j] == doctest::Approx(g.values[j]).epsilon(1e-6));
  }
}

TEST_CASE("tail dominance is reported when the grid is too short") {
  RadialProfile p;
  p.n = 1;
  for (double r = 0.0; r <= 1.0 + 1e-12; r += 0.01) {
    p.nodes.push_back(r);
    p.values.push_back(1.0);
  }
  p.tail_bound = 1.0;
  CHECK_THROWS_AS((void)apply_semigroup(p, 1.0, 1e-8), TailDominance);
}
