#include <doctest.h>

#include <cmath>
#include <random>

#include "osgood/errors.hpp"
#include "osgood/picard.hpp"

using namespace osgood;

namespace {

constexpr double kPi = 3.14159265358979323846;

PicardConfig base_config(Nonlinearity f, double T) {
  PicardConfig c;
  c.f = std::move(f);
  c.data = SingularData{0.875, 2.0, 1, 1.0};
  c.T = T;
  c.probe_times = {T};
  return c;
}

}  // namespace

TEST_CASE("nonlinearities") {
  const Nonlinearity z = Nonlinearity::zero();
  CHECK(z(5.0) == 0.0);
  const Nonlinearity lc = Nonlinearity::log_comparison();
  CHECK(lc(0.0) == 0.0);
  CHECK(lc(std::exp(1.0) - 1.0) == doctest::Approx(std::exp(1.0)));
  const Nonlinearity os = Nonlinearity::osgood(OsgoodFamily::power(4.0, 3.0));
  CHECK(os(3.0) == doctest::Approx((1.0 - std::pow(3.0, -3.0)) * 81.0));
  CHECK(os(1e300) > 0.0);
  CHECK(os.family() != nullptr);
}

TEST_CASE("refinement doubles densities and extends ranges") {
  PicardConfig c = base_config(Nonlinearity::zero(), 0.1);
  const PicardConfig r = refine(c, 2);
  CHECK(r.level == 2);
  CHECK(r.t_per_decade == 4.0 * c.t_per_decade);
  CHECK(r.r_per_decade == 4.0 * c.r_per_decade);
  CHECK(r.spacing == c.spacing / 4.0);
  CHECK(r.t_min == doctest::Approx(c.t_min * 1e-16));
  CHECK(r.r_min == doctest::Approx(c.r_min * 1e-6));
  CHECK_THROWS_AS((void)refine(c, -1), DomainError);
}

TEST_CASE("grids contain the probe times and radii") {
  PicardConfig c = base_config(Nonlinearity::zero(), 0.1);
  c.probe_times = {0.05, 0.1};
  const std::vector<double> t = make_time_grid(c);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 0.1);
  CHECK(std::find(t.begin(), t.end(), 0.05) != t.end());
  const std::vector<double> r = make_space_grid(c);
  CHECK(std::find(r.begin(), r.end(), 2.0) != r.end());
  CHECK(std::find(r.begin(), r.end(), 1.0) != r.end());
  CHECK(r.back() >= 4.0);
}

TEST_CASE("invalid configurations are rejected") {
  PicardConfig c = base_config(Nonlinearity::zero(), 0.1);
  c.T = 0.6;
  CHECK_THROWS((void)run_picard(c));
  c.T = 0.1;
  c.m_max = 0;
  CHECK_THROWS((void)run_picard(c));
}

TEST_CASE("iterate zero is the free evolution") {
  const PicardRun run = run_picard(base_config(Nonlinearity::zero(), 0.05));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(1, run.space_nodes.size() - 1);
  const std::size_t j = run.time_nodes.size() - 1;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t i = pick(rng);
    const double w = eval_w(run.config.data, run.space_nodes[i], run.time_nodes[j], 1e-10);
    CHECK(run.free_evolution[j][i] == doctest::Approx(w).epsilon(1e-6));
  }
}

TEST_CASE("zero source leaves the free evolution unchanged") {
  const PicardRun run = run_picard(base_config(Nonlinearity::zero(), 0.05));
  CHECK(run.converged);
  REQUIRE(run.probe_values.size() >= 2);
  for (std::size_t i = 0; i < run.space_nodes.size(); ++i) {
    CHECK(run.probe_values[1][0][i] == run.probe_values[0][0][i]);
  }
  const BlowupVerdict v = detect_blowup({run}, 2.0, 0.05);
  CHECK(v.verdict == Verdict::Converged);
}

TEST_CASE("log comparison converges geometrically") {
  const PicardRun run = run_picard(base_config(Nonlinearity::log_comparison(), 0.1));
  CHECK(run.converged);
  CHECK(run.iterations <= 20);
  CHECK(run.sup_diff.back() < 1e-4);
  for (std::size_t m = 1; m < run.sup_diff.size(); ++m) {
    CHECK(run.sup_diff[m] < run.sup_diff[m - 1]);
  }
  // Monotone in m and above the free evolution.
  for (double s : run.min_step) CHECK(s >= -1e-8);
  const std::size_t K = run.time_nodes.size() - 1;
  for (std::size_t i = 0; i < run.space_nodes.size(); ++i) {
    CHECK(run.final_iterate[K][i] >= run.free_evolution[K][i] * (1.0 - 1e-8));
  }
}

TEST_CASE("local L1 of simple profiles") {
  for (int n = 1; n <= 3; ++n) {
    RadialProfile c;
    c.n = n;
    for (double r = 0.0; r <= 3.0 + 1e-12; r += 0.25) {
      c.nodes.push_back(r);
      c.values.push_back(1.5);
    }
    for (double rho : {0.5, 1.3, 2.0}) {
      CHECK(local_l1(c, rho) ==
            doctest::Approx(1.5 * unit_ball_volume(n) * std::pow(rho, n)).epsilon(1e-13));
    }
    CHECK_THROWS_AS((void)local_l1(c, 3.5), DomainError);
  }

  // u0 = |x|^-2 on B(2) in three dimensions has mass 8 pi.
  const SingularData d{2.0, 2.0, 3, std::nullopt};
  GridSpec g;
  g.r_min = 1e-7;
  g.per_decade = 400.0;
  g.r_switch = 0.05;
  g.spacing = 1e-4;
  g.r_max = 2.5;
  g.required = {2.0};
  const std::vector<double> nodes = make_radial_grid(g);
  const RadialProfile u0 = sample_w(d, nodes, 0.0, 1e-8);
  CHECK(local_l1(u0, 2.0) == doctest::Approx(8.0 * kPi).epsilon(1e-4));
  CHECK(local_l1(u0, 1.0) <= local_l1(u0, 2.0));
}

TEST_CASE("verdict on hand-made evidence") {
  PicardRun run = run_picard(base_config(Nonlinearity::zero(), 0.02));
  run.cap_reached = true;
  CHECK(detect_blowup({run}, 2.0, 0.02).verdict == Verdict::DivergesLocally);
  CHECK(detect_blowup({}, 2.0, 0.02).verdict == Verdict::Inconclusive);
  run.cap_reached = false;
  CHECK(detect_blowup({run}, 2.0, 0.3).verdict == Verdict::Inconclusive);
  CHECK(to_string(Verdict::Converged) == "Converged");
}
