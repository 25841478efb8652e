#pragma once

#include <cstdint>
#include <random>

namespace nkg {

/// Seeded generator with platform-independent uniform and normal draws.
/// std::uniform_real_distribution / std::normal_distribution are
/// implementation-defined, which would break cross-build reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Gamma(shape, 1) variate by Marsaglia-Tsang squeeze; shape < 1 uses the
/// U^(1/shape) boost.
double gamma_variate(double shape, Rng& rng);

/// SplitMix64 finalizer applied to a base seed and up to two stream indices.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept;

}  // namespace nkg
