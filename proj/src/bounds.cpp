#include "nkg/bounds.hpp"

#include <cmath>
#include <string>

#include "nkg/error.hpp"
#include "nkg/specfun.hpp"

namespace nkg {

namespace {

void validate(const BoundQuery& q) {
  if (!std::isfinite(q.m) || q.m <= 0.0) throw Error(ErrorKind::Domain, "bound query needs m > 0");
  if (q.n < 1) throw Error(ErrorKind::Domain, "bound query needs n >= 1");
}

}  // namespace

double crlb(const BoundQuery& q) {
  validate(q);
  const double info = specfun::trigamma(specfun::PositiveReal(q.m)) - 1.0 / q.m;
  if (!(info > 0.0)) throw Error(ErrorKind::NonPositiveDenominator, "trigamma(m) - 1/m is not positive");
  return 1.0 / (static_cast<double>(q.n) * info);
}

double crlb_modified(const BoundQuery& q) {
  validate(q);
  const double denom = 2.0 * (specfun::digamma(specfun::PositiveReal(q.m + 0.5)) -
                              specfun::digamma(specfun::PositiveReal(q.m))) -
                       1.0 / q.m;
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::NonPositiveDenominator,
                "2 digamma(m + 1/2) - 2 digamma(m) - 1/m is not positive at m = " + std::to_string(q.m));
  }
  return 1.0 / (static_cast<double>(q.n) * denom);
}

double normalized(double bound_value, double m) {
  if (!(bound_value >= 0.0)) throw Error(ErrorKind::Domain, "bound value must be >= 0");
  if (!(m > 0.0)) throw Error(ErrorKind::Domain, "normalisation needs m > 0");
  return bound_value / (m * m);
}

}  // namespace nkg
