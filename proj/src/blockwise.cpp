#include "nkg/blockwise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "nkg/error.hpp"
#include "nkg/random.hpp"

namespace nkg {

std::string_view to_string(Centrality c) noexcept {
  switch (c) {
    case Centrality::Mean: return "mean";
    case Centrality::Median: return "median";
    case Centrality::Mode: return "mode";
  }
  return "unknown";
}

std::optional<Centrality> parse_centrality(std::string_view name) noexcept {
  for (Centrality c : {Centrality::Mean, Centrality::Median, Centrality::Mode}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

void validate(const RestartPolicy& policy) {
  if (policy.restarts < 1) throw Error(ErrorKind::InvalidConfig, "restarts must be >= 1");
  if (!(policy.jitter >= 0.0) || !std::isfinite(policy.jitter)) {
    throw Error(ErrorKind::InvalidConfig, "jitter must be finite and >= 0");
  }
}

double reduce(std::span<const double> values, Centrality centrality) {
  if (values.empty()) throw Error(ErrorKind::Domain, "cannot reduce an empty set of restarts");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  switch (centrality) {
    case Centrality::Mean: {
      // Summing in sorted order keeps the result independent of restart order.
      double sum = 0.0;
      for (double v : sorted) sum += v;
      return sum / static_cast<double>(n);
    }
    case Centrality::Median:
      return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    case Centrality::Mode: {
      constexpr std::size_t kBins = 32;
      const double lo = sorted.front();
      const double hi = sorted.back();
      if (hi == lo) return lo;
      const double width = (hi - lo) / kBins;
      std::array<std::size_t, kBins> counts{};
      for (double v : sorted) {
        auto bin = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(bin, kBins - 1)]++;
      }
      const auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      return lo + (static_cast<double>(best) + 0.5) * width;
    }
  }
  throw Error(ErrorKind::Domain, "unknown centrality");
}

Estimate estimate_block(EstimatorKind method, const SampleBlock& block, const RestartPolicy& policy) {
  validate(policy);
  if (method != EstimatorKind::ExactML || policy.restarts == 1) return estimate(method, block);

  const SufficientStats stats = compute_stats(block);
  const Estimate base = estimate_ml(stats);
  const double seed_point = (3.0 + std::sqrt(9.0 + 12.0 * stats.delta)) / (12.0 * stats.delta);

  Rng rng(policy.seed);
  std::vector<double> shapes{base.m_hat};
  int iterations = base.iterations;
  for (int r = 1; r < policy.restarts; ++r) {
    const double u = 2.0 * rng.uniform() - 1.0;
    MlSolverOptions opts;
    opts.initial = seed_point * std::max(1.0 + policy.jitter * u, 1e-3);
    const Estimate e = estimate_ml(stats, opts);
    shapes.push_back(e.m_hat);
    iterations += e.iterations;
  }
  const double m_hat = reduce(shapes, policy.centrality);
  return Estimate{m_hat, stats.mean_x2 / m_hat, EstimatorKind::ExactML, iterations, true};
}

BlockEstimatorState fold(BlockEstimatorState state, const Estimate& block_estimate) {
  const double i = static_cast<double>(++state.blocks_seen);
  if (state.blocks_seen == 1) {
    state.running_m = block_estimate.m_hat;
    state.running_sigma = block_estimate.sigma_hat;
  } else {
    state.running_m = ((i - 1.0) / i) * state.running_m + (1.0 / i) * block_estimate.m_hat;
    state.running_sigma = ((i - 1.0) / i) * state.running_sigma + (1.0 / i) * block_estimate.sigma_hat;
  }
  return state;
}

BlockEstimatorState ingest_block(BlockEstimatorState state, const SampleBlock& block, const RestartPolicy& policy) {
  Estimate e;
  try {
    e = estimate_block(state.method, block, policy);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::DegenerateBlock) throw;
    ++state.blocks_skipped;
    return state;
  }
  return fold(state, e);
}

Estimate finalize(const BlockEstimatorState& state) {
  if (state.blocks_seen == 0) throw Error(ErrorKind::NoBlocks, "no block has been folded into the estimate");
  return Estimate{state.running_m, state.running_sigma, state.method, 0, true};
}

}  // namespace nkg
