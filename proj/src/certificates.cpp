#include "osgood/certificates.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "osgood/errors.hpp"
#include "osgood/heat_semigroup.hpp"
#include "osgood/log_math.hpp"

namespace osgood {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void require_dim(int n) {
  if (n < 1) throw DomainError("dimension n must be a positive integer");
}

void check_params(const CertificateParams& p) {
  require_dim(p.n);
  if (!(p.M > 0.0)) throw DomainError("M must be positive");
  if (!(p.alpha > 0.0 && p.beta > 0.0 && p.beta < 0.5)) {
    throw DomainError("alpha must be positive and beta must lie in (0, 1/2)");
  }
  if (!(p.tau > 0.0 && p.tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  if (!(p.t > 0.0 && p.t <= p.tau)) throw DomainError("probe time t must lie in (0, tau]");
}

double time_exponent(const CertificateParams& p) { return 1.0 + p.n * p.beta; }

}  // namespace

AlphaBeta select_alpha_beta(int n, double q, double k) {
  require_dim(n);
  if (!(q >= 1.0)) throw DomainError("q must be >= 1");
  if (!(k * n > q * (n + 2.0))) {
    throw RegimeError("k must exceed q(1 + 2/n) for an admissible (alpha, beta) pair");
  }
  AlphaBeta ab;
  ab.alpha = 0.5 * ((n + 2.0) / k + n / q);
  ab.beta = 0.5 * (1.0 / (ab.alpha * k - n) + 0.5);
  return ab;
}

AlphaBeta select_alpha_beta_exponential(int n, double q) {
  require_dim(n);
  if (!(q >= 1.0)) throw DomainError("q must be >= 1");
  return AlphaBeta{n / (2.0 * q), 0.25};
}

double threshold_time(double log_phi_i, double M, double alpha, double beta) {
  if (!(M > 0.0)) throw DomainError("M must be positive");
  if (!(alpha > 0.0 && beta > 0.0)) throw DomainError("alpha and beta must be positive");
  const double log_m = std::log(M);
  if (!(log_phi_i >= log_m)) throw DomainError("threshold requires phi_i >= M");
  return -(log_phi_i - log_m) / (alpha * beta);
}

Certificate lemma_lower_bound(const OsgoodFamily& family, const CertificateParams& params,
                              std::size_t i) {
  if (family.mode() != GrowthMode::Power) throw ModeError("the global bound needs power mode");
  check_params(params);
  if (i < 1) throw IndexError("certificate index must be >= 1");
  Certificate c;
  c.index = i;
  c.log_phi_i = family.log_phi(i);
  c.log_t_i = threshold_time(c.log_phi_i, params.M, params.alpha, params.beta);
  c.admissible = c.log_t_i <= std::log(params.t);
  if (!c.admissible) throw AdmissibilityError("threshold time t_i exceeds the probe time");

  const double ab = params.alpha * params.beta;
  const double e = time_exponent(params);
  const double omega = unit_ball_volume(params.n);
  c.constants.omega_n = omega;
  c.constants.time_factor = 1.0 / e;
  c.constants.log_c = std::log(omega / (2.0 * e)) + (e / ab) * std::log(params.M);
  if (family.saturated(i)) {
    c.log_lower_bound = logmath::kPosInf;
    c.height = family.height(i);
    return c;
  }
  c.log_lower_bound = c.constants.log_c + (params.k - e / ab) * c.log_phi_i;
  return c;
}

double gaussian_tail_constant(double rho, int n) {
  require_dim(n);
  if (!(rho > 1.0)) throw DomainError("rho must exceed 1");
  const double a = 0.5 * (rho - 1.0);
  if (std::isinf(a)) return std::pow(kPi, 0.5 * n);
  return std::pow(kPi, 0.5 * n) * boost::math::gamma_p(0.5 * n, a * a);
}

Certificate theorem_lower_bound(const OsgoodFamily& family, const CertificateParams& params,
                                std::size_t i) {
  check_params(params);
  if (!(params.rho > 1.0)) throw DomainError("rho must exceed 1");
  if (i < 1) throw IndexError("certificate index must be >= 1");
  Certificate c;
  c.index = i;
  c.log_phi_i = family.log_phi(i);
  const double log_m = std::log(params.M);
  if (family.saturated(i)) {
    c.log_t_i = logmath::kNegInf;
  } else {
    c.log_t_i = threshold_time(c.log_phi_i, params.M, params.alpha, params.beta);
  }
  c.admissible = c.log_t_i <= std::log(params.t);
  if (!c.admissible) throw AdmissibilityError("threshold time t_i exceeds the probe time");

  const int n = params.n;
  const double e = time_exponent(params);
  const double ab = params.alpha * params.beta;
  CertificateConstants& k = c.constants;
  k.normalization = std::pow(4.0 * kPi, -0.5 * n);
  k.jacobian = std::ldexp(1.0, n);
  k.gaussian_mass = gaussian_tail_constant(params.rho, n);
  k.omega_n = unit_ball_volume(n);
  k.time_factor = 1.0 / e;
  k.log_c = std::log(k.normalization * k.jacobian * k.gaussian_mass * k.omega_n * k.time_factor / 2.0);

  if (family.mode() == GrowthMode::Power) {
    if (family.saturated(i)) {
      c.log_lower_bound = logmath::kPosInf;
      c.height = family.height(i);
      return c;
    }
    // log phi_{i+1} + e log t_i with log phi_{i+1} = k log phi_i.
    c.log_lower_bound = k.log_c + (e / ab) * log_m + (family.k() - e / ab) * c.log_phi_i;
    return c;
  }
  // Exponential mode: log phi_{i+1} = phi_i.
  const double phi_i = logmath::exp_or_inf(c.log_phi_i);
  if (!std::isfinite(phi_i)) {
    c.log_lower_bound = logmath::kPosInf;
    c.height = family.saturated(i) ? family.height(i) + 1 : 1;
    return c;
  }
  c.log_lower_bound = k.log_c + phi_i + e * c.log_t_i;
  return c;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::GlobalExistence: return "GlobalExistence";
    case Regime::NonExistence: return "NonExistence";
    case Regime::OpenGap: return "OpenGap";
  }
  return "?";
}

RegimeVerdict classify_regime(int n, double q, double k) {
  require_dim(n);
  if (!(q >= 1.0)) throw DomainError("q must be >= 1");
  if (!(k > 1.0)) throw DomainError("k must exceed 1");
  // Compare k n against n + 2q and q (n + 2) so integer boundaries are exact.
  const double kn = k * n;
  const double lower = n + 2.0 * q;
  const double upper = q * (n + 2.0);
  RegimeVerdict v;
  if (kn < lower) {
    v.verdict = Regime::GlobalExistence;
    v.binding = "k < 1 + 2q/n";
  } else if (kn == lower && q > 1.0) {
    v.verdict = Regime::GlobalExistence;
    v.binding = "k = 1 + 2q/n with q > 1";
  } else if (kn > upper) {
    v.verdict = Regime::NonExistence;
    v.binding = "k > q(1 + 2/n)";
  } else {
    v.verdict = Regime::OpenGap;
    v.binding = "1 + 2q/n <= k <= q(1 + 2/n)";
  }
  return v;
}

CertificateReport certify_nonexistence(const OsgoodFamily& family, int n, double q, double t,
                                       double rho, std::size_t i_max, double tau, double R) {
  CertificateReport report;
  if (family.mode() == GrowthMode::Power) {
    report.regime = classify_regime(n, q, family.k());
    if (report.regime.verdict != Regime::NonExistence) {
      throw RegimeError("parameters are not in the non-existence regime (" +
                        report.regime.binding + ")");
    }
    report.exponents = select_alpha_beta(n, q, family.k());
  } else {
    report.regime.verdict = Regime::NonExistence;
    report.regime.binding = "exponential growth rule, any q";
    report.exponents = select_alpha_beta_exponential(n, q);
  }
  SingularData data;
  data.n = n;
  data.alpha = report.exponents.alpha;
  data.R = R;
  data.q = q;
  report.M = compute_M(data);

  CertificateParams params;
  params.n = n;
  params.q = q;
  params.k = family.k();
  params.alpha = report.exponents.alpha;
  params.beta = report.exponents.beta;
  params.M = report.M;
  params.rho = rho;
  params.t = t;
  params.tau = tau;
  check_params(params);

  const double log_m = std::log(report.M);
  const double log_t = std::log(t);
  for (std::size_t i = 1; i <= i_max; ++i) {
    if (!family.saturated(i)) {
      if (family.log_phi(i) < log_m) continue;
      if (threshold_time(family.log_phi(i), report.M, params.alpha, params.beta) > log_t) continue;
    }
    const Certificate c = theorem_lower_bound(family, params, i);
    if (!report.first_admissible) report.first_admissible = i;
    report.certificates.push_back(c);
    if (std::isinf(c.log_lower_bound)) break;
  }
  return report;
}

}  // namespace osgood
