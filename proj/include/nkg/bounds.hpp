#pragma once

#include <cstddef>

namespace nkg {

struct BoundQuery {
  double m = 1.0;
  std::size_t n = 1;
};

/// Cramer-Rao bound on var(m_hat) with the spread jointly unknown:
/// 1 / (N [trigamma(m) - 1/m]).
double crlb(const BoundQuery& q);

/// Modified bound with trigamma(m) replaced by its concavity lower estimate
/// 2 (digamma(m + 1/2) - digamma(m)):
/// 1 / (N [2 digamma(m + 1/2) - 2 digamma(m) - 1/m]). Always >= crlb.
double crlb_modified(const BoundQuery& q);

/// Variance normalised by m^2.
double normalized(double bound_value, double m);

}  // namespace nkg
