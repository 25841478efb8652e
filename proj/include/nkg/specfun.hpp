#pragma once

// Real-valued gamma-family special functions on the positive axis.
//
// All routines shift the argument upward with the functional recurrence until
// it exceeds kAsymptoticThreshold and then evaluate the Stirling / Bernoulli
// asymptotic series. Non-positive or non-finite arguments throw
// Error(ErrorKind::Domain).

namespace nkg::specfun {

/// Strictly positive, finite real. Construction validates.
class PositiveReal {
 public:
  explicit PositiveReal(double value);
  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

 private:
  double value_;
};

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kAsymptoticThreshold = 10.0;

double log_gamma(PositiveReal x);
double gamma(PositiveReal x);  // exp(log_gamma(x)); overflows to +inf for x > ~171
double digamma(PositiveReal x);
double trigamma(PositiveReal x);

}  // namespace nkg::specfun
