#include "nkg/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "nkg/bounds.hpp"
#include "nkg/error.hpp"
#include "nkg/nakagami.hpp"
#include "nkg/random.hpp"

namespace nkg {

void validate(const BenchConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::InvalidConfig, field + ": " + why);
  };
  if (cfg.m_grid.empty()) fail("m_grid", "must not be empty");
  for (double m : cfg.m_grid) {
    if (!std::isfinite(m) || m <= 0.0) fail("m_grid", "values must be positive and finite");
  }
  if (!std::isfinite(cfg.omega) || cfg.omega <= 0.0) fail("omega", "must be positive and finite");
  if (cfg.block_size < 2) fail("block_size", "must be >= 2");
  if (cfg.num_blocks < 1) fail("num_blocks", "must be >= 1");
  if (cfg.trials < 1) fail("trials", "must be >= 1");
  if (cfg.estimators.empty()) fail("estimators", "must not be empty");
  try {
    validate(cfg.restart_policy);
  } catch (const Error& e) {
    fail("restart_policy", e.what());
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::string normalized = value;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<std::string> items;
  for (std::string item; in >> item;) items.push_back(item);
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorKind::InvalidConfig, key + ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

BenchConfig parse_bench_config(std::istream& in, BenchConfig cfg) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));

    if (key == "m_grid") {
      cfg.m_grid.clear();
      for (const auto& item : split_list(value)) cfg.m_grid.push_back(parse_number<double>(key, item));
    } else if (key == "omega") {
      cfg.omega = parse_number<double>(key, value);
    } else if (key == "block_size") {
      cfg.block_size = parse_number<std::size_t>(key, value);
    } else if (key == "num_blocks") {
      cfg.num_blocks = parse_number<std::size_t>(key, value);
    } else if (key == "trials") {
      cfg.trials = parse_number<std::size_t>(key, value);
    } else if (key == "estimators") {
      cfg.estimators.clear();
      for (const auto& item : split_list(value)) {
        const auto kind = parse_estimator_kind(item);
        if (!kind) throw Error(ErrorKind::InvalidConfig, "estimators: unknown estimator '" + item + "'");
        cfg.estimators.push_back(*kind);
      }
    } else if (key == "base_seed") {
      cfg.base_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "restarts") {
      cfg.restart_policy.restarts = parse_number<int>(key, value);
    } else if (key == "centrality") {
      const auto c = parse_centrality(value);
      if (!c) throw Error(ErrorKind::InvalidConfig, "centrality: unknown value '" + value + "'");
      cfg.restart_policy.centrality = *c;
    } else if (key == "jitter") {
      cfg.restart_policy.jitter = parse_number<double>(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_number<unsigned>(key, value);
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown key '" + key + "' on line " + std::to_string(line_no));
    }
  }
  return cfg;
}

const BenchRow& BenchResult::row(double m_true, EstimatorKind estimator) const {
  for (const auto& r : rows) {
    if (r.m_true == m_true && r.estimator == estimator) return r;
  }
  throw Error(ErrorKind::Domain, "no bench row for m=" + std::to_string(m_true) + " estimator=" +
                                     std::string(to_string(estimator)));
}

namespace {

// Finalized shape for each estimator in one trial; nullopt marks a failure.
std::vector<std::optional<double>> run_trial(const BenchConfig& cfg, const NakagamiParams& params,
                                             std::uint64_t trial_seed) {
  std::vector<SampleBlock> blocks;
  blocks.reserve(cfg.num_blocks);
  for (std::size_t b = 0; b < cfg.num_blocks; ++b) {
    blocks.push_back(sample(params, cfg.block_size, derive_seed(trial_seed, b)));
  }
  std::vector<std::optional<double>> out;
  out.reserve(cfg.estimators.size());
  for (EstimatorKind kind : cfg.estimators) {
    try {
      BlockEstimatorState state;
      state.method = kind;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        RestartPolicy policy = cfg.restart_policy;
        policy.seed = derive_seed(trial_seed, b, 1);
        state = ingest_block(state, blocks[b], policy);
      }
      out.emplace_back(finalize(state).m_hat);
    } catch (const Error&) {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace

BenchResult run_bench(const BenchConfig& cfg) {
  validate(cfg);
  BenchResult result;
  result.trials = cfg.trials;

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.trials));

  for (std::size_t j = 0; j < cfg.m_grid.size(); ++j) {
    const double m = cfg.m_grid[j];
    const NakagamiParams params = NakagamiParams::from_omega(m, cfg.omega);

    std::vector<std::vector<std::optional<double>>> per_trial(cfg.trials);
    {
      std::vector<std::jthread> workers;
      for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
          for (std::size_t t = w; t < cfg.trials; t += threads) {
            per_trial[t] = run_trial(cfg, params, derive_seed(cfg.base_seed, j, t));
          }
        });
      }
    }

    const std::size_t block_n = cfg.block_size;
    const std::size_t total_n = cfg.block_size * cfg.num_blocks;
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      BenchRow row;
      row.m_true = m;
      row.estimator = cfg.estimators[e];
      double sum = 0.0;
      for (const auto& trial : per_trial) {
        if (trial[e]) {
          sum += *trial[e];
          ++row.successes;
        } else {
          ++row.failures;
        }
      }
      if (row.successes > 0) row.mean_m_hat = sum / static_cast<double>(row.successes);
      if (row.successes > 1) {
        double ss = 0.0;
        for (const auto& trial : per_trial) {
          if (trial[e]) ss += (*trial[e] - row.mean_m_hat) * (*trial[e] - row.mean_m_hat);
        }
        row.variance = ss / static_cast<double>(row.successes - 1);
      }
      row.normalized_variance = normalized(row.variance, m);
      row.crlb_block = crlb({m, block_n});
      row.crlb_total = crlb({m, total_n});
      row.crlb_modified_total = crlb_modified({m, total_n});
      result.rows.push_back(row);
    }
  }

  std::stable_sort(result.rows.begin(), result.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.m_true != b.m_true) return a.m_true < b.m_true;
    return to_string(a.estimator) < to_string(b.estimator);
  });
  return result;
}

void emit_csv(const BenchResult& result, std::ostream& out) {
  if (result.rows.empty()) throw Error(ErrorKind::Domain, "bench result has no rows");
  out << kBenchCsvHeader << '\n';
  char buf[512];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.12e,%s,%.12e,%.12e,%.12e,%zu,%.12e,%.12e,%.12e\n", r.m_true,
                  std::string(to_string(r.estimator)).c_str(), r.mean_m_hat, r.variance, r.normalized_variance,
                  r.failures, r.crlb_block, r.crlb_total, r.crlb_modified_total);
    out << buf;
  }
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed to write bench CSV");
}

}  // namespace nkg
