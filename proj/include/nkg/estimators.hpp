#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "nkg/nakagami.hpp"

namespace nkg {

/// Per-block statistics shared by every shape estimator.
/// delta = ln(mean_x2) - mean_log_x2 is scale-free and >= 0 by Jensen.
struct SufficientStats {
  std::size_t n = 0;
  double mean_x2 = 0.0;
  double mean_log_x2 = 0.0;
  double delta = 0.0;
};

enum class EstimatorKind {
  ExactML,
  ChengBeaulieu1,
  ChengBeaulieu2,
  GreenwoodDurand,
  MomentBased,
};

inline constexpr std::array<EstimatorKind, 5> kAllEstimators = {
    EstimatorKind::ExactML,         EstimatorKind::ChengBeaulieu1, EstimatorKind::ChengBeaulieu2,
    EstimatorKind::GreenwoodDurand, EstimatorKind::MomentBased,
};

/// Snake-case identifier used on the command line and in CSV output.
std::string_view to_string(EstimatorKind kind) noexcept;
std::optional<EstimatorKind> parse_estimator_kind(std::string_view name) noexcept;

struct Estimate {
  double m_hat = 0.0;
  double sigma_hat = 0.0;
  EstimatorKind method = EstimatorKind::ExactML;
  int iterations = 0;  // solver steps; 0 for closed forms
  bool converged = false;
};

/// Blocks with delta at or below this are degenerate (all samples equal).
inline constexpr double kDeltaMin = 1e-12;

SufficientStats compute_stats(const SampleBlock& block);

// Residual of the ML stationarity condition after eliminating sigma:
// g(m) = ln m - digamma(m) - delta. Strictly decreasing, root is the ML shape.
double ml_residual(double m, double delta);

struct MlSolverOptions {
  /// Starting point for Newton. Defaults to the second-order closed form.
  std::optional<double> initial;
  int max_iterations = 100;
  double tolerance = 1e-10;
};

Estimate estimate_ml(const SufficientStats& stats, const MlSolverOptions& options = {});
Estimate estimate_cheng_beaulieu_1(const SufficientStats& stats);
Estimate estimate_cheng_beaulieu_2(const SufficientStats& stats);
Estimate estimate_greenwood_durand(const SufficientStats& stats);
Estimate estimate_moment_based(const SampleBlock& block);

/// Dispatch on kind. ExactML uses default solver options.
Estimate estimate(EstimatorKind kind, const SampleBlock& block);

}  // namespace nkg
