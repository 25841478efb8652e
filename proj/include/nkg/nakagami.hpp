#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nkg {

/// Nakagami-m parameters in the (m, sigma) form, sigma = Omega / m where
/// Omega = E[x^2]. Density: 2 / (Gamma(m) sigma^m) x^(2m-1) exp(-x^2/sigma).
class NakagamiParams {
 public:
  NakagamiParams(double m, double sigma);
  static NakagamiParams from_omega(double m, double omega) { return {m, omega / m}; }

  double m() const noexcept { return m_; }
  double sigma() const noexcept { return sigma_; }
  double omega() const noexcept { return m_ * sigma_; }

 private:
  double m_;
  double sigma_;
};

/// Non-empty run of strictly positive, finite envelope samples.
class SampleBlock {
 public:
  explicit SampleBlock(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

double log_pdf(const NakagamiParams& params, double x);
double pdf(const NakagamiParams& params, double x);
double block_log_likelihood(const NakagamiParams& params, const SampleBlock& block);

/// n i.i.d. draws x = sqrt(g), g ~ Gamma(shape m, scale sigma).
SampleBlock sample(const NakagamiParams& params, std::size_t n, std::uint64_t seed);

/// E[x^k] = sigma^(k/2) Gamma(m + k/2) / Gamma(m), k in {2, 4, 6}.
double analytic_moment(const NakagamiParams& params, int k);

}  // namespace nkg
