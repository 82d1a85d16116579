#include <doctest.h>

#include <cmath>

#include "osgood/certificates.hpp"
#include "osgood/errors.hpp"
#include "osgood/heat_semigroup.hpp"

using namespace osgood;

namespace {

constexpr double kPi = 3.14159265358979323846;

CertificateParams worked(double M) {
  CertificateParams p;
  p.M = M;
  return p;
}

}  // namespace

TEST_CASE("admissible exponent selection") {
  const AlphaBeta a = select_alpha_beta(1, 1.0, 4.0);
  CHECK(a.alpha == doctest::Approx(0.875));
  CHECK(a.beta == doctest::Approx(0.45));
  const AlphaBeta b = select_alpha_beta(2, 1.0, 5.0);
  CHECK(b.alpha == doctest::Approx(1.4));
  CHECK(b.beta == doctest::Approx(0.35));
  CHECK_THROWS_AS((void)select_alpha_beta(1, 1.0, 3.0), RegimeError);
  const AlphaBeta e = select_alpha_beta_exponential(1, 2.0);
  CHECK(e.alpha == 0.25);
  CHECK(e.beta == 0.25);
}

TEST_CASE("threshold time") {
  CHECK(threshold_time(std::log(2.0), 2.0, 0.875, 0.45) == 0.0);
  CHECK(threshold_time(10.0, 1.0, 0.875, 0.45) == doctest::Approx(-10.0 / 0.39375));
  CHECK(threshold_time(20.0, 1.0, 0.875, 0.45) == doctest::Approx(2.0 * threshold_time(10.0, 1.0, 0.875, 0.45)));
  CHECK_THROWS_AS((void)threshold_time(0.0, 2.0, 0.875, 0.45), DomainError);
}

TEST_CASE("gaussian mass constant") {
  CHECK(gaussian_tail_constant(2.0, 1) == doctest::Approx(std::sqrt(kPi) * std::erf(0.5)).epsilon(1e-14));
  CHECK(gaussian_tail_constant(2.0, 1) == doctest::Approx(0.922562).epsilon(1e-6));
  CHECK(gaussian_tail_constant(1.0 + 1e-9, 2) < 1e-15);
  CHECK(gaussian_tail_constant(1e6, 3) == doctest::Approx(std::pow(kPi, 1.5)));
  CHECK_THROWS_AS((void)gaussian_tail_constant(1.0, 1), DomainError);
}

TEST_CASE("global bound has the exact affine slope in log phi") {
  const OsgoodFamily f = OsgoodFamily::power(4.0, 3.0);
  const CertificateParams p = worked(0.9);
  const double slope = 4.0 - 1.45 / 0.39375;
  CHECK(slope == doctest::Approx(0.31746).epsilon(1e-4));
  const Certificate a = lemma_lower_bound(f, p, 3);
  const Certificate b = lemma_lower_bound(f, p, 4);
  CHECK((b.log_lower_bound - a.log_lower_bound) / (b.log_phi_i - a.log_phi_i) ==
        doctest::Approx(slope).epsilon(1e-12));
  CHECK(a.constants.log_c ==
        doctest::Approx(std::log(2.0 / (2.0 * 1.45)) + (1.45 / 0.39375) * std::log(0.9)));
  CHECK_THROWS_AS((void)lemma_lower_bound(f, p, 0), IndexError);
  CHECK_THROWS_AS((void)lemma_lower_bound(OsgoodFamily::exponential(2.0), p, 3), ModeError);
}

TEST_CASE("ball-local bound") {
  const OsgoodFamily f = OsgoodFamily::power(4.0, 3.0);
  const CertificateParams p = worked(0.9);
  const Certificate c1 = theorem_lower_bound(f, p, 1);
  CHECK(c1.admissible);
  CHECK(c1.constants.normalization == doctest::Approx(1.0 / std::sqrt(4.0 * kPi)));
  CHECK(c1.constants.jacobian == 2.0);
  const double expected = std::log(std::pow(4.0 * kPi, -0.5) * 2.0 * gaussian_tail_constant(2.0, 1) *
                                   2.0 / (2.0 * 1.45)) +
                          (1.45 / 0.39375) * std::log(0.9) +
                          (4.0 - 1.45 / 0.39375) * std::log(81.0);
  CHECK(c1.log_lower_bound == doctest::Approx(expected).epsilon(1e-13));
  double prev = c1.log_lower_bound;
  for (std::size_t i = 2; i <= 40; ++i) {
    const Certificate c = theorem_lower_bound(f, p, i);
    CHECK(c.log_lower_bound > prev);
    prev = c.log_lower_bound;
  }
  CertificateParams late = p;
  late.M = 2.9;
  late.t = 1e-5;
  CHECK_THROWS_AS((void)theorem_lower_bound(f, late, 1), AdmissibilityError);
}

TEST_CASE("exponential-mode bound grows at least like phi_i / 2") {
  const OsgoodFamily f = OsgoodFamily::exponential(2.0);
  CertificateParams p;
  p.alpha = 0.5;
  p.beta = 0.25;
  p.M = 0.8;
  const double c0 = theorem_lower_bound(f, p, 1).log_lower_bound - f.phi(1) / 2.0;
  for (std::size_t i = 1; i <= 8; ++i) {
    const Certificate c = theorem_lower_bound(f, p, i);
    if (std::isinf(c.log_lower_bound)) {
      CHECK(c.height >= 1);
      continue;
    }
    CHECK(c.log_lower_bound >= f.phi(i) / 2.0 + std::min(c0, 0.0) - 1e-9);
  }
}

TEST_CASE("regime classifier") {
  CHECK(classify_regime(1, 1.0, 2.5).verdict == Regime::GlobalExistence);
  CHECK(classify_regime(1, 1.0, 3.5).verdict == Regime::NonExistence);
  CHECK(classify_regime(2, 2.0, 3.5).verdict == Regime::OpenGap);
  CHECK(classify_regime(2, 2.0, 3.0).verdict == Regime::GlobalExistence);
  CHECK(classify_regime(1, 1.0, 3.0).verdict == Regime::OpenGap);
  CHECK(classify_regime(2, 2.0, 4.0).verdict == Regime::OpenGap);
  CHECK(classify_regime(3, 1.5, 10.0).verdict == Regime::NonExistence);
  CHECK_THROWS_AS((void)classify_regime(0, 1.0, 2.0), DomainError);
}

TEST_CASE("classifier boundaries on a grid") {
  for (int n = 1; n <= 4; ++n) {
    for (double q : {1.0, 1.5, 2.0, 3.0, 5.0}) {
      for (int j = 0; j < 10; ++j) {
        const double k = 1.0 + 0.5 * (j + 1) * q;
        const double lo = 1.0 + 2.0 * q / n;
        const double hi = q * (1.0 + 2.0 / n);
        const Regime r = classify_regime(n, q, k).verdict;
        const int hits = (k < lo || (k == lo && q > 1.0)) + (k > hi) +
                         (!(k < lo || (k == lo && q > 1.0)) && !(k > hi));
        CHECK(hits == 1);
        if (k * n < n + 2.0 * q) CHECK(r == Regime::GlobalExistence);
        if (k * n > q * (n + 2.0)) CHECK(r == Regime::NonExistence);
      }
    }
  }
}

TEST_CASE("certificate chain end to end") {
  const OsgoodFamily f = OsgoodFamily::power(4.0, 3.0);
  const CertificateReport rep = certify_nonexistence(f, 1, 1.0, 0.5, 2.0, 40);
  CHECK(rep.regime.verdict == Regime::NonExistence);
  CHECK(rep.certificates.size() >= 30);
  REQUIRE(rep.first_admissible.has_value());
  CHECK(*rep.first_admissible == rep.certificates.front().index);
  for (std::size_t j = 1; j < rep.certificates.size(); ++j) {
    CHECK(rep.certificates[j].log_lower_bound > rep.certificates[j - 1].log_lower_bound);
    CHECK(rep.certificates[j].log_t_i < rep.certificates[j - 1].log_t_i);
  }
  CHECK(rep.M == doctest::Approx(compute_M(SingularData{0.875, 2.0, 1, 1.0})));

  const CertificateReport none = certify_nonexistence(OsgoodFamily::power(4.0, 1.3), 1, 1.0, 1e-300, 2.0, 1);
  CHECK(none.certificates.empty());
  CHECK(none.regime.verdict == Regime::NonExistence);

  CHECK_THROWS_AS((void)certify_nonexistence(OsgoodFamily::power(2.5, 3.0), 1, 1.0, 0.5, 2.0, 40),
                  RegimeError);

  for (double q : {1.0, 2.0, 5.0}) {
    const CertificateReport e = certify_nonexistence(OsgoodFamily::exponential(2.0), 1, q, 0.5, 2.0, 40);
    CHECK(e.regime.verdict == Regime::NonExistence);
    REQUIRE(!e.certificates.empty());
    CHECK(std::isinf(e.certificates.back().log_lower_bound));
  }
}
