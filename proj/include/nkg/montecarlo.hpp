#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nkg/blockwise.hpp"
#include "nkg/estimators.hpp"

namespace nkg {

/// A block-window study: num_blocks successive blocks of block_size samples
/// per trial, each estimator smoothed across blocks by the recursive mean.
struct BenchConfig {
  std::vector<double> m_grid{0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  double omega = 1.0;
  std::size_t block_size = 30;
  std::size_t num_blocks = 5;
  std::size_t trials = 2000;
  std::vector<EstimatorKind> estimators{kAllEstimators.begin(), kAllEstimators.end()};
  std::uint64_t base_seed = 0;
  RestartPolicy restart_policy{};
  unsigned threads = 0;  // 0: hardware concurrency. Output does not depend on it.
};

/// Throws Error(InvalidConfig) naming the offending field.
void validate(const BenchConfig& cfg);

/// Apply `key = value` lines on top of `base`. Blank lines and `#` comments
/// are ignored; lists are comma or whitespace separated.
BenchConfig parse_bench_config(std::istream& in, BenchConfig base = {});

struct BenchRow {
  double m_true = 0.0;
  EstimatorKind estimator = EstimatorKind::ExactML;
  double mean_m_hat = 0.0;
  double variance = 0.0;  // (successes - 1) divisor; 0 with fewer than 2 successes
  double normalized_variance = 0.0;
  std::size_t failures = 0;
  std::size_t successes = 0;
  double crlb_block = 0.0;           // N = block_size
  double crlb_total = 0.0;           // N = block_size * num_blocks
  double crlb_modified_total = 0.0;  // N = block_size * num_blocks
};

struct BenchResult {
  std::size_t trials = 0;
  std::vector<BenchRow> rows;  // sorted by (m_true, estimator name)

  const BenchRow& row(double m_true, EstimatorKind estimator) const;
};

/// Trial t at grid index j draws its blocks from derive_seed(base_seed, j, t);
/// every estimator sees the same blocks. Per-trial estimator failures are
/// counted in the row, not thrown.
BenchResult run_bench(const BenchConfig& cfg);

inline constexpr const char* kBenchCsvHeader =
    "m_true,estimator,mean_m_hat,variance,normalized_variance,failures,crlb_block,crlb_total,crlb_modified_total";

/// Writes the CSV table. Throws Error(Io) if the stream goes bad.
void emit_csv(const BenchResult& result, std::ostream& out);

}  // namespace nkg
