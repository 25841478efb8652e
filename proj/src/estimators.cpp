#include "nkg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nkg/error.hpp"
#include "nkg/specfun.hpp"

namespace nkg {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::ExactML: return "exact_ml";
    case EstimatorKind::ChengBeaulieu1: return "cheng_beaulieu_1";
    case EstimatorKind::ChengBeaulieu2: return "cheng_beaulieu_2";
    case EstimatorKind::GreenwoodDurand: return "greenwood_durand";
    case EstimatorKind::MomentBased: return "moment_based";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view name) noexcept {
  for (EstimatorKind kind : kAllEstimators) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

SufficientStats compute_stats(const SampleBlock& block) {
  double sum_x2 = 0.0;
  double sum_log_x2 = 0.0;
  for (double x : block.values()) {
    sum_x2 += x * x;
    sum_log_x2 += 2.0 * std::log(x);
  }
  SufficientStats stats;
  stats.n = block.size();
  stats.mean_x2 = sum_x2 / static_cast<double>(stats.n);
  stats.mean_log_x2 = sum_log_x2 / static_cast<double>(stats.n);
  // Rounding can push an all-equal block a few ulps below zero.
  stats.delta = std::max(0.0, std::log(stats.mean_x2) - stats.mean_log_x2);
  return stats;
}

namespace {

void require_informative(const SufficientStats& stats) {
  if (!(stats.mean_x2 > 0.0) || !std::isfinite(stats.mean_x2)) {
    throw Error(ErrorKind::Domain, "mean of x^2 must be positive and finite");
  }
  if (!std::isfinite(stats.delta)) throw Error(ErrorKind::Domain, "delta is not finite");
  if (stats.delta <= kDeltaMin) {
    throw Error(ErrorKind::DegenerateBlock, "delta " + std::to_string(stats.delta) +
                                                " is at or below the degeneracy threshold (all samples equal?)");
  }
}

Estimate closed_form(const SufficientStats& stats, double m_hat, EstimatorKind kind) {
  return Estimate{m_hat, stats.mean_x2 / m_hat, kind, 0, true};
}

double cb2_shape(double delta) { return (3.0 + std::sqrt(9.0 + 12.0 * delta)) / (12.0 * delta); }

}  // namespace

double ml_residual(double m, double delta) {
  const specfun::PositiveReal shape(m);
  return std::log(m) - specfun::digamma(shape) - delta;
}

Estimate estimate_ml(const SufficientStats& stats, const MlSolverOptions& options) {
  require_informative(stats);
  const double delta = stats.delta;

  double m = options.initial.value_or(cb2_shape(delta));
  if (!std::isfinite(m) || m <= 0.0) throw Error(ErrorKind::Domain, "ML solver initial point must be positive");

  // Bracket [lo, hi] with g(lo) > 0 > g(hi); g decreases from +inf to 0.
  double lo = m;
  double hi = m;
  double g = ml_residual(m, delta);
  if (std::abs(g) < options.tolerance) return Estimate{m, stats.mean_x2 / m, EstimatorKind::ExactML, 0, true};
  constexpr int kMaxBracketSteps = 2000;
  int steps = 0;
  if (g > 0.0) {
    while (ml_residual(hi, delta) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++steps > kMaxBracketSteps) throw Error(ErrorKind::NoConvergence, "could not bracket ML root from above");
    }
  } else {
    while (ml_residual(lo, delta) < 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++steps > kMaxBracketSteps) throw Error(ErrorKind::NoConvergence, "could not bracket ML root from below");
    }
  }

  for (int it = 1; it <= options.max_iterations; ++it) {
    const double slope = 1.0 / m - specfun::trigamma(specfun::PositiveReal(m));
    double next = m - g / slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    m = next;
    g = ml_residual(m, delta);
    if (std::abs(g) < options.tolerance) {
      return Estimate{m, stats.mean_x2 / m, EstimatorKind::ExactML, it, true};
    }
    if (g > 0.0) {
      lo = m;
    } else {
      hi = m;
    }
  }
  throw Error(ErrorKind::NoConvergence,
              "ML solver exceeded " + std::to_string(options.max_iterations) + " iterations (delta=" +
                  std::to_string(delta) + ")");
}

Estimate estimate_cheng_beaulieu_1(const SufficientStats& stats) {
  require_informative(stats);
  return closed_form(stats, 1.0 / (2.0 * stats.delta), EstimatorKind::ChengBeaulieu1);
}

Estimate estimate_cheng_beaulieu_2(const SufficientStats& stats) {
  require_informative(stats);
  return closed_form(stats, cb2_shape(stats.delta), EstimatorKind::ChengBeaulieu2);
}

Estimate estimate_greenwood_durand(const SufficientStats& stats) {
  require_informative(stats);
  const double y = stats.delta;
  if (y > 17.0) {
    throw Error(ErrorKind::OutOfRange,
                "Greenwood-Durand approximation is defined for delta <= 17, got " + std::to_string(y));
  }
  double m_hat;
  if (y <= 0.5772) {
    m_hat = (0.5000876 + 0.1648852 * y - 0.0544274 * y * y) / y;
  } else {
    m_hat = (8.898919 + 9.059950 * y + 0.9775373 * y * y) / (y * (17.79728 + 11.968477 * y + y * y));
  }
  return closed_form(stats, m_hat, EstimatorKind::GreenwoodDurand);
}

Estimate estimate_moment_based(const SampleBlock& block) {
  if (block.size() < 2) throw Error(ErrorKind::DegenerateBlock, "moment estimator needs at least 2 samples");
  const double n = static_cast<double>(block.size());
  double mean_x2 = 0.0;
  for (double x : block.values()) mean_x2 += x * x;
  mean_x2 /= n;
  // Two-pass central moment: mean x^4 - (mean x^2)^2 cancels badly at large m.
  double var_x2 = 0.0;
  for (double x : block.values()) {
    const double d = x * x - mean_x2;
    var_x2 += d * d;
  }
  var_x2 /= n;
  if (!(var_x2 > kDeltaMin * mean_x2 * mean_x2)) {
    throw Error(ErrorKind::DegenerateBlock, "sample variance of x^2 is zero");
  }
  const double m_hat = mean_x2 * mean_x2 / var_x2;
  return Estimate{m_hat, mean_x2 / m_hat, EstimatorKind::MomentBased, 0, true};
}

Estimate estimate(EstimatorKind kind, const SampleBlock& block) {
  switch (kind) {
    case EstimatorKind::ExactML: return estimate_ml(compute_stats(block));
    case EstimatorKind::ChengBeaulieu1: return estimate_cheng_beaulieu_1(compute_stats(block));
    case EstimatorKind::ChengBeaulieu2: return estimate_cheng_beaulieu_2(compute_stats(block));
    case EstimatorKind::GreenwoodDurand: return estimate_greenwood_durand(compute_stats(block));
    case EstimatorKind::MomentBased: return estimate_moment_based(block);
  }
  throw Error(ErrorKind::Domain, "unknown estimator kind");
}

}  // namespace nkg
