#include "nkg/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nkg/error.hpp"

namespace nkg::specfun {

PositiveReal::PositiveReal(double value) : value_(value) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw Error(ErrorKind::Domain, "argument must be positive and finite, got " + std::to_string(value));
  }
}

namespace {

// Horner evaluation of sum_k c[k] * t^k.
template <std::size_t N>
double poly(const double (&c)[N], double t) {
  double acc = 0.0;
  for (std::size_t k = N; k-- > 0;) acc = acc * t + c[k];
  return acc;
}

}  // namespace

double log_gamma(PositiveReal arg) {
  double x = arg;
  double shift_product = 1.0;
  while (x < kAsymptoticThreshold) {
    shift_product *= x;
    x += 1.0;
  }
  // B_{2k} / (2k (2k-1)) in powers of 1/x^2, leading 1/x factored out.
  static constexpr double kStirling[] = {
      1.0 / 12.0,    -1.0 / 360.0,           1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0,  -691.0 / 360360.0,      1.0 / 156.0,
  };
  const double inv = 1.0 / x;
  const double series = inv * poly(kStirling, inv * inv);
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return (x - 0.5) * std::log(x) - x + half_log_two_pi + series - std::log(shift_product);
}

double gamma(PositiveReal x) { return std::exp(log_gamma(x)); }

double digamma(PositiveReal arg) {
  double x = arg;
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / x;
    x += 1.0;
  }
  // B_{2k} / (2k) in powers of 1/x^2, leading 1/x^2 factored out.
  static constexpr double kSeries[] = {
      1.0 / 12.0,  -1.0 / 120.0,        1.0 / 252.0, -1.0 / 240.0,
      1.0 / 132.0, -691.0 / 32760.0,    1.0 / 12.0,
  };
  const double inv2 = 1.0 / (x * x);
  return std::log(x) - 0.5 / x - inv2 * poly(kSeries, inv2) - shift;
}

double trigamma(PositiveReal arg) {
  double x = arg;
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  // B_{2k} in powers of 1/x^2, leading 1/x^3 factored out.
  static constexpr double kSeries[] = {
      1.0 / 6.0,  -1.0 / 30.0,        1.0 / 42.0, -1.0 / 30.0,
      5.0 / 66.0, -691.0 / 2730.0,    7.0 / 6.0,
  };
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv + 0.5 * inv2 + inv * inv2 * poly(kSeries, inv2) + shift;
}

}  // namespace nkg::specfun
