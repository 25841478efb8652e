#pragma once

#include <cstdint>
#include <span>

#include "nkg/estimators.hpp"

namespace nkg {

enum class Centrality { Mean, Median, Mode };

std::string_view to_string(Centrality c) noexcept;
std::optional<Centrality> parse_centrality(std::string_view name) noexcept;

/// Multi-restart heuristic for the iterative ML solver. Restart 0 starts
/// from the solver's default seed; restart r > 0 scales that seed by
/// (1 + jitter * u), u uniform in (-1, 1) drawn from `seed`.
struct RestartPolicy {
  int restarts = 1;
  Centrality centrality = Centrality::Mean;
  double jitter = 0.1;
  std::uint64_t seed = 0;
};

void validate(const RestartPolicy& policy);

/// Reduce restart results. Mode is the midpoint of the fullest of 32
/// equal-width bins over [min, max] (lowest bin wins ties).
double reduce(std::span<const double> values, Centrality centrality);

/// Running state of the block-recursive mean smoother.
struct BlockEstimatorState {
  EstimatorKind method = EstimatorKind::ExactML;
  std::size_t blocks_seen = 0;
  std::size_t blocks_skipped = 0;  // degenerate blocks, not folded
  double running_m = 0.0;
  double running_sigma = 0.0;
};

/// Per-block estimate with the restart heuristic applied (ExactML only).
Estimate estimate_block(EstimatorKind method, const SampleBlock& block, const RestartPolicy& policy);

/// Fold a block estimate into the running means:
/// m_i = ((i - 1) / i) m_{i-1} + (1 / i) m_hat.
BlockEstimatorState fold(BlockEstimatorState state, const Estimate& block_estimate);

/// Estimate one block and fold it in. DegenerateBlock is swallowed: the state
/// comes back unchanged apart from blocks_skipped. Other errors propagate.
BlockEstimatorState ingest_block(BlockEstimatorState state, const SampleBlock& block,
                                 const RestartPolicy& policy = {});

/// Throws Error(NoBlocks) if nothing has been folded yet.
Estimate finalize(const BlockEstimatorState& state);

}  // namespace nkg
