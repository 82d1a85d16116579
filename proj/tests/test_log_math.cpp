#include <doctest.h>

#include <cmath>

#include "osgood/log_math.hpp"

using namespace osgood::logmath;

TEST_CASE("log_add_exp handles infinities and large gaps") {
  CHECK(log_add_exp(kNegInf, 3.0) == 3.0);
  CHECK(log_add_exp(3.0, kNegInf) == 3.0);
  CHECK(log_add_exp(kPosInf, 1.0) == kPosInf);
  CHECK(log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(log_add_exp(1000.0, 0.0) == 1000.0);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + kLn2));
}

TEST_CASE("log_sub_exp and log1m_exp") {
  CHECK(log_sub_exp(std::log(9.0), std::log(3.0)) == doctest::Approx(std::log(6.0)));
  CHECK(log_sub_exp(2.0, 2.0) == kNegInf);
  CHECK(log_sub_exp(2.0, kNegInf) == 2.0);
  CHECK(log1m_exp(-1e-20) == doctest::Approx(std::log(1e-20)));
  CHECK(log1m_exp(-50.0) == doctest::Approx(-std::exp(-50.0)).epsilon(1e-12));
  // log(e^{2000} - e^{1999}) = 2000 + log(1 - 1/e)
  CHECK(log_sub_exp(2000.0, 1999.0) == doctest::Approx(2000.0 + std::log1p(-std::exp(-1.0))));
}

TEST_CASE("exp_or_inf saturates instead of overflowing") {
  CHECK(exp_or_inf(1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(exp_or_inf(710.0) == kPosInf);
  CHECK(std::isfinite(exp_or_inf(709.0)));
}
