#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tube/log_real.hpp"

using tube::LogReal;

TEST_CASE("round trip across the double range") {
  for (double x : {1e-300, 1e-100, 1e-3, 1.0, 17.25, 1e100, 1e300}) {
    const LogReal lr = LogReal::from_double(x);
    CHECK(lr.to_double() == doctest::Approx(x).epsilon(1e-14));
    const LogReal neg = LogReal::from_double(-x);
    CHECK(neg.to_double() == doctest::Approx(-x).epsilon(1e-14));
  }
}

TEST_CASE("products and powers stay exact in the log domain") {
  const LogReal a = LogReal::from_double(3.0);
  const LogReal b = LogReal::from_double(-7.0);
  CHECK((a * b).to_double() == doctest::Approx(-21.0).epsilon(1e-15));
  CHECK((a / b).to_double() == doctest::Approx(-3.0 / 7.0).epsilon(1e-15));
  CHECK(a.pow(10.0).to_double() == doctest::Approx(std::pow(3.0, 10.0)).epsilon(1e-14));
  // far outside double range
  const LogReal huge = LogReal::exp_of(20000.0);
  const LogReal ratio = huge / (huge * LogReal::from_double(2.0));
  CHECK(ratio.to_double() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("signed sums via log-sum-exp") {
  const LogReal a = LogReal::from_double(1e280);
  const LogReal b = LogReal::from_double(2.5e280);
  CHECK((a + b).log10_magnitude() ==
        doctest::Approx(std::log10(3.5) + 280.0).epsilon(1e-14));
  CHECK((a - b).sign() == -1);
  CHECK((a - b).log10_magnitude() ==
        doctest::Approx(std::log10(1.5) + 280.0).epsilon(1e-13));
  CHECK((a - a).is_zero());
}

TEST_CASE("expm1 of a large exponent matches the exponent to leading order") {
  const LogReal e = LogReal::expm1_of(17790.0);
  CHECK(e.log_magnitude() == doctest::Approx(17790.0).epsilon(1e-12));
  const LogReal small = LogReal::expm1_of(1e-8);
  CHECK(small.to_double() == doctest::Approx(std::expm1(1e-8)).epsilon(1e-12));
}

TEST_CASE("tagged infinity behaves like the extended reals") {
  const LogReal inf = LogReal::infinity();
  CHECK(inf.is_infinite());
  CHECK((LogReal::from_double(5.0) < inf));
  CHECK(min(inf, LogReal::from_double(2.0)).to_double() == 2.0);
  CHECK((LogReal::from_double(1.0) / inf).is_zero());
}

TEST_CASE("power-of-ten rendering") {
  CHECK(LogReal::from_log(+1, -100.30 * std::log(10.0)).to_pow10_string() == "10^{-100.30}");
  CHECK(LogReal::zero().to_pow10_string() == "0");
  CHECK(LogReal::infinity().to_pow10_string() == "inf");
}
