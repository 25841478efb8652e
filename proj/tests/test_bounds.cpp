#include <doctest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <cmath>
#include <numbers>

#include "nkg/bounds.hpp"
#include "nkg/error.hpp"

using namespace nkg;

TEST_CASE("reference bound values") {
  const double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  CHECK(crlb({1.0, 150}) == doctest::Approx(1.0 / (150 * (pi2_6 - 1))).epsilon(1e-12));
  CHECK(crlb({1.0, 150}) == doctest::Approx(0.0103369740).epsilon(1e-8));
  CHECK(crlb({1.0, 1}) == doctest::Approx(1.5505460967).epsilon(1e-9));

  // digamma(1.5) - digamma(1) = 2 - 2 ln 2 exactly.
  const double denom = 2.0 * (2.0 - 2.0 * std::numbers::ln2) - 1.0;
  CHECK(crlb_modified({1.0, 150}) == doctest::Approx(1.0 / (150 * denom)).epsilon(1e-12));
  CHECK(crlb_modified({1.0, 150}) == doctest::Approx(0.02931546198).epsilon(1e-9));
  CHECK(crlb_modified({1.0, 1}) == doctest::Approx(4.397319297).epsilon(1e-9));
}

TEST_CASE("agreement with independent digamma/trigamma") {
  for (double m : {0.1, 0.5, 2.0, 7.5, 30.0}) {
    const double ref = 1.0 / (10 * (boost::math::trigamma(m) - 1.0 / m));
    const double ref_mod = 1.0 / (10 * (2 * boost::math::digamma(m + 0.5) - 2 * boost::math::digamma(m) - 1.0 / m));
    CHECK(crlb({m, 10}) == doctest::Approx(ref).epsilon(1e-9));
    CHECK(crlb_modified({m, 10}) == doctest::Approx(ref_mod).epsilon(1e-9));
  }
}

TEST_CASE("ordering, positivity and 1/N scaling on the log grid") {
  double prev_ratio = INFINITY;
  double prev_gap = INFINITY;
  for (int i = 0; i < 60; ++i) {
    const double m = 0.1 * std::pow(500.0, i / 59.0);
    const double c = crlb({m, 150});
    const double cm = crlb_modified({m, 150});
    INFO("m=" << m);
    CHECK(c > 0);
    CHECK(cm >= c);
    CHECK(crlb({m, 300}) == doctest::Approx(c / 2).epsilon(1e-15));
    CHECK(crlb_modified({m, 300}) == doctest::Approx(cm / 2).epsilon(1e-15));
    // Information gap 1/(N c) - 1/(N cm) shrinks; the ratio falls towards 2.
    const double ratio = cm / c;
    CHECK(ratio <= prev_ratio * (1 + 1e-9));
    CHECK(ratio > 2.0);
    CHECK(1 / c - 1 / cm <= prev_gap);
    prev_ratio = ratio;
    prev_gap = 1 / c - 1 / cm;
  }
}

TEST_CASE("normalisation and errors") {
  CHECK(normalized(0.04, 2.0) == doctest::Approx(0.01));
  CHECK(normalized(0.37, 1.0) == 0.37);
  CHECK(normalized(crlb({4, 150}), 4) == crlb({4, 150}) / 16);
  CHECK_THROWS_AS(crlb({0.0, 10}), Error);
  CHECK_THROWS_AS(crlb_modified({-1.0, 10}), Error);
  CHECK_THROWS_AS(crlb({1.0, 0}), Error);
  CHECK_THROWS_AS(normalized(-1.0, 1.0), Error);
}
