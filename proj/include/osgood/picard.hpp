#pragma once

// Monotone Picard iteration for the mild formulation
//   u(t) = S(t)u0 + int_0^t S(t - s) f(u(s)) ds
// on radial grids, with local L1 diagnostics and a divergence/convergence
// verdict across refinement levels.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "osgood/heat_semigroup.hpp"
#include "osgood/osgood_family.hpp"

namespace osgood {

enum class NonlinearityKind { Osgood, LogComparison, Zero };

[[nodiscard]] std::string to_string(NonlinearityKind kind);

class Nonlinearity {
 public:
  static Nonlinearity osgood(const OsgoodFamily& family);
  /// (u + 1) log(u + 1)
  static Nonlinearity log_comparison();
  static Nonlinearity zero();

  [[nodiscard]] NonlinearityKind kind() const { return kind_; }
  [[nodiscard]] const OsgoodFamily* family() const { return family_ ? &*family_ : nullptr; }
  [[nodiscard]] double operator()(double u) const;

 private:
  NonlinearityKind kind_ = NonlinearityKind::Zero;
  std::optional<OsgoodFamily> family_;
};

struct PicardConfig {
  Nonlinearity f = Nonlinearity::zero();
  SingularData data;
  double T = 0.1;
  double tau = 0.5;
  double rho = 2.0;
  int m_max = 20;
  double conv_tol = 1e-4;   // relative sup difference between iterates
  double quad_tol = 1e-8;   // eval_w tolerance for the free evolution
  double value_cap = 1e30;
  std::vector<double> probe_times;

  // Resolution at the current level.
  int level = 0;
  double t_min = 1e-6;
  double t_per_decade = 8.0;
  double r_min = 1e-4;
  double r_per_decade = 8.0;
  double r_switch = 0.05;
  double spacing = 0.02;
  double r_max = 0.0;  // 0 picks max(2 rho, R + 10 sqrt(4 T))

  // Per-level refinement: densities double, spacing halves and the smallest
  // time and radius move down by these many decades.
  double t_decades_per_level = 8.0;
  double r_decades_per_level = 3.0;

  /// Throws DomainError / ParameterViolation on invalid settings.
  void validate() const;
};

/// The configuration at refinement level `level` (counted from `base`).
[[nodiscard]] PicardConfig refine(const PicardConfig& base, int level);

struct PicardRun {
  PicardConfig config;
  std::vector<double> time_nodes;   // 0 = t_0 < ... < t_K = T
  std::vector<double> space_nodes;  // shared by all profiles
  std::vector<std::size_t> probe_index;  // time index of each probe time

  // free_evolution[j] = S(t_j) u0 on the grid (iterate m = 0).
  std::vector<std::vector<double>> free_evolution;
  // probe_values[m][p] = u^(m)(probe_times[p]) on the grid.
  std::vector<std::vector<std::vector<double>>> probe_values;
  // Last computed iterate at every time node.
  std::vector<std::vector<double>> final_iterate;

  std::vector<double> sup_diff;   // relative sup |u^(m+1) - u^(m)|, per m
  std::vector<double> min_step;   // relative min (u^(m+1) - u^(m)), per m
  std::vector<bool> saturated;    // value_cap hit in iterate m
  int iterations = 0;             // highest m computed
  bool converged = false;
  bool cap_reached = false;

  /// u^(m)(probe_times[p]) as a profile.
  [[nodiscard]] RadialProfile probe_profile(int m, std::size_t p) const;
  /// S(t_j) u0 as a profile.
  [[nodiscard]] RadialProfile free_profile(std::size_t j) const;
  /// Index of a probe time; DomainError if t was not configured as a probe.
  [[nodiscard]] std::size_t probe_slot(double t) const;
};

[[nodiscard]] std::vector<double> make_time_grid(const PicardConfig& config);
[[nodiscard]] std::vector<double> make_space_grid(const PicardConfig& config);

/// Runs up to m_max iterations (stopping early once converged).
[[nodiscard]] PicardRun run_picard(const PicardConfig& config);

/// n omega_n int_0^rho r^(n-1) profile(r) dr, exact for the interpolant.
[[nodiscard]] double local_l1(const RadialProfile& profile, double rho);

enum class Verdict { DivergesLocally, Converged, Inconclusive };

[[nodiscard]] std::string to_string(Verdict verdict);

struct BlowupVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double rho = 0.0;
  double t_probe = 0.0;
  double factor_threshold = 10.0;
  // evidence[L][m] = local L1 of u^(m)(t_probe) over B(rho) at level L.
  std::vector<std::vector<double>> evidence;
  // growth_factors[L] = final value at level L over final value at level 0.
  std::vector<double> growth_factors;
  std::vector<bool> monotone;   // per level, nondecreasing in m
  std::vector<bool> converged;  // per level
  bool cap_reached = false;
  std::string reason;
};

[[nodiscard]] BlowupVerdict detect_blowup(const std::vector<PicardRun>& runs, double rho,
                                          double t_probe, double factor_threshold = 10.0);

}  // namespace osgood
