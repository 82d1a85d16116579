#pragma once

// Explicit lower bounds for the L1 norm of any would-be solution, admissible
// exponent selection, and the (n, q, k) regime map.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "osgood/osgood_family.hpp"

namespace osgood {

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

/// alpha = midpoint of ((n+2)/k, n/q), beta = midpoint of (1/(alpha k - n), 1/2).
/// RegimeError unless k > q(1 + 2/n).
[[nodiscard]] AlphaBeta select_alpha_beta(int n, double q, double k);

/// Exponential-mode choice: alpha = n/(2q), beta = 1/4.
[[nodiscard]] AlphaBeta select_alpha_beta_exponential(int n, double q);

/// log t_i = -(log phi_i - log M) / (alpha beta). DomainError if phi_i < M.
[[nodiscard]] double threshold_time(double log_phi_i, double M, double alpha, double beta);

struct CertificateParams {
  int n = 1;
  double q = 1.0;
  double k = 4.0;
  double alpha = 0.875;
  double beta = 0.45;
  double M = 1.0;
  double rho = 2.0;
  double t = 0.5;
  double tau = 0.5;
};

struct CertificateConstants {
  double normalization = 0.0;   // (4 pi)^(-n/2)
  double jacobian = 0.0;        // 2^n from x = 2 sqrt(t - s) z
  double gaussian_mass = 0.0;   // C'(rho, n)
  double omega_n = 0.0;
  double time_factor = 0.0;     // 1 / (1 + n beta)
  double log_c = 0.0;           // log of the assembled constant
};

struct Certificate {
  std::size_t index = 0;
  double log_phi_i = 0.0;
  double log_t_i = 0.0;
  double log_lower_bound = 0.0;
  bool admissible = false;
  std::size_t height = 0;  // > 0 when the bound is +inf at that tetration level
  CertificateConstants constants;
};

/// Global L1 bound at index i (power mode). AdmissibilityError if t_i > t.
[[nodiscard]] Certificate lemma_lower_bound(const OsgoodFamily& family,
                                            const CertificateParams& params, std::size_t i);

/// C' = int_{|v| <= (rho-1)/2} exp(-|v|^2) dv. DomainError if rho <= 1.
[[nodiscard]] double gaussian_tail_constant(double rho, int n);

/// Ball-local bound on B(rho) at index i, power or exponential mode.
/// AdmissibilityError if t_i > t.
[[nodiscard]] Certificate theorem_lower_bound(const OsgoodFamily& family,
                                              const CertificateParams& params, std::size_t i);

enum class Regime { GlobalExistence, NonExistence, OpenGap };

[[nodiscard]] std::string to_string(Regime regime);

struct RegimeVerdict {
  Regime verdict = Regime::OpenGap;
  std::string binding;  // which inequality fired
};

[[nodiscard]] RegimeVerdict classify_regime(int n, double q, double k);

struct CertificateReport {
  RegimeVerdict regime;
  AlphaBeta exponents;
  double M = 0.0;
  std::vector<Certificate> certificates;  // admissible indices only, increasing i
  std::optional<std::size_t> first_admissible;
};

/// Runs the full chain for i = 1 .. i_max. In power mode RegimeError unless
/// the parameters are in the non-existence regime; exponential mode skips
/// the k test. M comes from the singular data with cutoff R.
[[nodiscard]] CertificateReport certify_nonexistence(const OsgoodFamily& family, int n, double q,
                                                     double t, double rho, std::size_t i_max,
                                                     double tau = 0.5, double R = 2.0);

}  // namespace osgood
