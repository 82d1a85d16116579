#pragma once

// The heat semigroup S(t) on radial functions in dimensions 1, 2, 3.
//
// For radial g, (S(t)g)(r) = int_0^inf rho^(n-1) K_n(r, rho, t) g(rho) drho,
// where K_n is the spherical average of the Gaussian kernel (see
// simd/kernels.hpp). The singular data u0 = |x|^-alpha on |x| <= R is handled
// by the substitution rho = sigma^(1/(n-alpha)), which turns
// rho^(n-1-alpha) drho into a constant multiple of dsigma.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace osgood {

struct SingularData {
  double alpha = 0.875;
  double R = 2.0;
  int n = 1;
  std::optional<double> q;  // integrability class, if the data is tied to one

  /// Throws ParameterViolation unless 0 < alpha < n, R > 1, n in {1,2,3}
  /// and alpha * q < n.
  void validate() const;

  /// u0(r); +inf at r = 0.
  [[nodiscard]] double u0(double r) const;

  /// Total mass n * omega_n * R^(n - alpha) / (n - alpha).
  [[nodiscard]] double mass() const;
};

struct SemigroupConstants {
  int n = 1;
  double omega_n = 2.0;     // volume of the unit ball
  double sphere_area = 2.0; // n * omega_n
  std::string kernel_tag;
};

[[nodiscard]] SemigroupConstants semigroup_constants(int n);
[[nodiscard]] double unit_ball_volume(int n);

/// Radial profile sampled on 0 = r_0 < r_1 < ... < r_m = r_max and read as its
/// piecewise-linear interpolant, extended by zero beyond r_max. When the
/// underlying function is unbounded at the origin, values[0] repeats
/// values[1] and singular_origin is set.
struct RadialProfile {
  int n = 1;
  std::vector<double> nodes;
  std::vector<double> values;
  double time = 0.0;
  double tail_bound = 0.0;  // sup of the function beyond r_max
  bool singular_origin = false;

  [[nodiscard]] double r_max() const { return nodes.back(); }
  [[nodiscard]] std::size_t size() const { return nodes.size(); }
  /// Piecewise-linear value at r (0 beyond r_max).
  [[nodiscard]] double operator()(double r) const;
  /// Throws DomainError on malformed grids or negative values.
  void validate() const;
};

/// Geometric nodes from r_min (density per_decade) up to r_switch, then
/// uniform spacing up to r_max; `required` radii are inserted exactly.
struct GridSpec {
  double r_min = 1e-6;
  double per_decade = 8.0;
  double r_switch = 0.05;
  double spacing = 0.02;
  double r_max = 10.0;
  std::vector<double> required;
};

[[nodiscard]] std::vector<double> make_radial_grid(const GridSpec& spec);

/// w(r, t) = (S(t) min(u0, cap))(r), with absolute error <= tol * max(1, w).
/// Requires t > 0 and tol in [1e-12, 1e-4]. Throws QuadratureFailure.
[[nodiscard]] double eval_w(const SingularData& data, double r, double t, double tol,
                            double cap = std::numeric_limits<double>::infinity());

/// w(., t) sampled on `nodes`; t = 0 gives u0 itself.
[[nodiscard]] RadialProfile sample_w(const SingularData& data, std::span<const double> nodes,
                                     double t, double tol);

struct MassEstimate {
  double inner = 0.0;       // n omega_n int_0^r_cut r^(n-1) w dr
  double tail_bound = 0.0;  // certified bound on the mass beyond r_cut
  double r_cut = 0.0;
  [[nodiscard]] double total() const { return inner + tail_bound; }
};

/// Mass of S(t)u0 by nested quadrature of eval_w over radii.
[[nodiscard]] MassEstimate mass_of_w(const SingularData& data, double t, double tol);

struct MEstimate {
  double M = 0.0;          // certified lower bound on inf_{(0,1]} w(1, t)
  double scan_min = 0.0;   // refined minimum of the sampled values
  double t_argmin = 0.0;
  double limit_at_zero = 1.0;  // w(1, 0+) = u0(1)
  bool limit_verified = false; // w(1, t_floor) within 1e-3 of the limit
};

/// min over t in [t_floor, 1] of w(1, t) via a 64-point log scan plus
/// golden-section refinement, lowered by the quadrature tolerance and capped
/// by the t -> 0+ limit. Results are memoized per (data, t_floor).
[[nodiscard]] MEstimate compute_M_detailed(const SingularData& data, double t_floor = 1e-6);
[[nodiscard]] double compute_M(const SingularData& data, double t_floor = 1e-6);

struct ScalingCheck {
  bool holds = false;
  double left = 0.0;    // w(t^beta, t)
  double right = 0.0;   // t^(-alpha beta) w(1, t^(1 - 2 beta))
  double margin = 0.0;  // (left - right) / right
};

[[nodiscard]] ScalingCheck scaling_inequality_check(const SingularData& data, double beta,
                                                    double t, double tol);

/// Kernel mass beyond distance d for S(dt) in dimension n:
/// Q(n/2, d^2 / (4 dt)).
[[nodiscard]] double gaussian_tail_fraction(int n, double d, double dt);

/// S(dt) restricted to piecewise-linear profiles on a fixed node set, stored
/// as banded weight rows so that repeated applications reduce to dot products.
class SemigroupOperator {
 public:
  SemigroupOperator(int n, std::vector<double> nodes, double dt);

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] std::size_t weight_count() const;

  /// out = W * in on the node set (zero extension beyond r_max).
  void apply_values(std::span<const double> in, std::span<double> out) const;

  /// Full application with tail accounting. TailDominance if the input tail
  /// could contribute more than tol at some node r <= r_max / 2.
  [[nodiscard]] RadialProfile apply(const RadialProfile& in, double tol) const;

 private:
  struct Row {
    std::size_t first = 0;
    std::vector<double> weights;
  };

  int n_;
  double dt_;
  std::vector<double> nodes_;
  std::vector<Row> rows_;
};

/// One-shot S(dt) on a profile.
[[nodiscard]] RadialProfile apply_semigroup(const RadialProfile& profile, double dt, double tol);

}  // namespace osgood
