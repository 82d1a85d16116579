#pragma once

// The piecewise Osgood nonlinearity built on a doubly exponential threshold
// sequence phi_0 < phi_1 < ...:
//
//   f(s) = (1 - phi_0^(1-k)) s^k      on J_0 = [0, phi_0]
//   f(s) = phi_i - phi_{i-1}          on I_i = [phi_{i-1}, phi_i / 2]
//   f(s) = affine interpolant l_i     on J_i = (phi_i / 2, phi_i)
//
// with phi_{i+1} = phi_i^k (power mode) or phi_{i+1} = exp(phi_i)
// (exponential mode), plus the step comparison function f_tilde <= f.
//
// The thresholds leave the double range after a handful of indices, so the
// sequence is stored as log(phi_i) and every evaluation has a log-domain path.

#include <cstddef>
#include <string>
#include <vector>

namespace osgood {

enum class GrowthMode { Power, Exponential };

[[nodiscard]] std::string to_string(GrowthMode mode);
[[nodiscard]] GrowthMode growth_mode_from_string(const std::string& text);

/// Identifies the piece of the nonlinearity an argument falls in.
struct Block {
  enum class Kind { J0, I, J };
  Kind kind = Kind::J0;
  std::size_t index = 0;  // 0 for J0, i >= 1 otherwise

  friend bool operator==(const Block&, const Block&) = default;
};

[[nodiscard]] std::string to_string(const Block& block);

class OsgoodFamily {
 public:
  /// Validates the construction inequality and materializes the sequence.
  /// `k` is ignored in exponential mode. Throws ParameterViolation.
  static OsgoodFamily build(GrowthMode mode, double k, double phi0);
  static OsgoodFamily power(double k, double phi0) { return build(GrowthMode::Power, k, phi0); }
  static OsgoodFamily exponential(double phi0) {
    return build(GrowthMode::Exponential, 0.0, phi0);
  }

  [[nodiscard]] GrowthMode mode() const noexcept { return mode_; }
  [[nodiscard]] double k() const noexcept { return k_; }
  [[nodiscard]] double phi0() const noexcept { return phi0_; }

  /// Largest index whose log(phi_i) is finite.
  [[nodiscard]] std::size_t max_index() const noexcept { return log_phi_.size() - 1; }

  /// log(phi_i); +inf past max_index().
  [[nodiscard]] double log_phi(std::size_t i) const noexcept;

  /// phi_i in plain arithmetic; +inf once it leaves the double range.
  [[nodiscard]] double phi(std::size_t i) const noexcept;

  /// Number of exponentiations stacked on top of the last finite log(phi)
  /// (tetration level of the saturated index); 0 for materialized indices.
  [[nodiscard]] std::size_t height(std::size_t i) const noexcept;

  [[nodiscard]] bool saturated(std::size_t i) const noexcept { return i > max_index(); }

  /// Flat record `mode=...;k=...;phi0=...;max_index=...`.
  [[nodiscard]] std::string to_record() const;
  static OsgoodFamily from_record(const std::string& record);

 private:
  OsgoodFamily() = default;

  GrowthMode mode_ = GrowthMode::Power;
  double k_ = 0.0;
  double phi0_ = 0.0;
  std::vector<double> log_phi_;
  std::vector<double> phi_;  // plain values while finite
};

/// Result of evaluating f or f_tilde.
struct PiecewiseValue {
  double log_value = 0.0;  // -inf for a zero value
  double value = 0.0;      // plain value; +inf when not representable
  Block block;
  // Affine pieces only: log of the endpoint values f(phi_i/2), f(phi_i) and
  // the interpolation parameter lambda in [0, 1].
  double log_left = 0.0;
  double log_right = 0.0;
  double lambda = 0.0;
};

/// Arguments above this are refused by the plain-valued entry points.
inline constexpr double kSaturationLogS = 700.0;

[[nodiscard]] PiecewiseValue eval_f(const OsgoodFamily& family, double s);
/// Log-domain argument; usable for any s whose block thresholds are materialized.
[[nodiscard]] PiecewiseValue eval_f_log(const OsgoodFamily& family, double log_s);

[[nodiscard]] PiecewiseValue eval_f_tilde(const OsgoodFamily& family, double s);
[[nodiscard]] PiecewiseValue eval_f_tilde_log(const OsgoodFamily& family, double log_s);

/// Block containing s (log domain), with the boundary convention
/// phi_0 -> J0, phi_i / 2 -> I_i, phi_i -> I_{i+1}.
[[nodiscard]] Block locate_block(const OsgoodFamily& family, double log_s);

/// log of the constant value phi_i - phi_{i-1} taken on I_i, i >= 1.
[[nodiscard]] double log_plateau(const OsgoodFamily& family, std::size_t i);

/// The affine piece l_i evaluated at interpolation parameter lambda in [0, 1]
/// (lambda = 0 at phi_i / 2, lambda = 1 at phi_i).
[[nodiscard]] PiecewiseValue eval_affine_piece(const OsgoodFamily& family, std::size_t i,
                                               double lambda);

/// (phi_i/2 - phi_{i-1}) / (phi_i - phi_{i-1}); the time the ODE spends on I_i.
[[nodiscard]] double osgood_block_term(const OsgoodFamily& family, std::size_t i);

/// log(1/2 - term_i) = log(r / (2 (1 - r))) with r = phi_{i-1} / phi_i; stays
/// finite after the term itself has rounded to 1/2. -inf past the materialized range.
[[nodiscard]] double osgood_block_log_deficit(const OsgoodFamily& family, std::size_t i);

/// Sum of the first n block terms: a lower bound for the Osgood integral.
[[nodiscard]] double osgood_partial_sum(const OsgoodFamily& family, std::size_t n);

struct EnvelopeCheck {
  bool holds = false;
  double log_margin = 0.0;  // log(2^k s^k) - log f(s)
};

/// f(s) <= 2^k s^k; power mode only (ModeError otherwise).
[[nodiscard]] EnvelopeCheck envelope_check(const OsgoodFamily& family, double s);
[[nodiscard]] EnvelopeCheck envelope_check_log(const OsgoodFamily& family, double log_s);

}  // namespace osgood
