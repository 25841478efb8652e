#include "nkg/nakagami.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nkg/error.hpp"
#include "nkg/random.hpp"
#include "nkg/specfun.hpp"

namespace nkg {

NakagamiParams::NakagamiParams(double m, double sigma) : m_(m), sigma_(sigma) {
  if (!std::isfinite(m) || m <= 0.0) {
    throw Error(ErrorKind::Domain, "Nakagami shape m must be positive and finite");
  }
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw Error(ErrorKind::Domain, "Nakagami spread sigma must be positive and finite");
  }
}

SampleBlock::SampleBlock(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::Domain, "sample block is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] <= 0.0) {
      throw Error(ErrorKind::Domain, "sample " + std::to_string(i) + " is not a positive finite value");
    }
  }
}

double log_pdf(const NakagamiParams& params, double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw Error(ErrorKind::Domain, "Nakagami density evaluated outside x > 0");
  }
  const double m = params.m();
  const double sigma = params.sigma();
  return std::numbers::ln2 - specfun::log_gamma(specfun::PositiveReal(m)) - m * std::log(sigma) +
         (2.0 * m - 1.0) * std::log(x) - x * x / sigma;
}

double pdf(const NakagamiParams& params, double x) { return std::exp(log_pdf(params, x)); }

double block_log_likelihood(const NakagamiParams& params, const SampleBlock& block) {
  double total = 0.0;
  for (double x : block.values()) total += log_pdf(params, x);
  return total;
}

SampleBlock sample(const NakagamiParams& params, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::Domain, "sample count must be at least 1");
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(n);
  while (out.size() < n) {
    const double x = std::sqrt(gamma_variate(params.m(), rng) * params.sigma());
    // Gamma draws with m << 1 can underflow to 0, which is outside the support.
    if (x > 0.0 && std::isfinite(x)) out.push_back(x);
  }
  return SampleBlock(std::move(out));
}

double analytic_moment(const NakagamiParams& params, int k) {
  if (k != 2 && k != 4 && k != 6) {
    throw Error(ErrorKind::Domain, "analytic_moment supports k in {2, 4, 6}, got " + std::to_string(k));
  }
  // Gamma(m + j) / Gamma(m) = m (m + 1) ... (m + j - 1)
  double moment = 1.0;
  for (int i = 0; i < k / 2; ++i) moment *= (params.m() + i) * params.sigma();
  return moment;
}

}  // namespace nkg
