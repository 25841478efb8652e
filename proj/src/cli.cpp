#include "nkg/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "nkg/blockwise.hpp"
#include "nkg/bounds.hpp"
#include "nkg/error.hpp"
#include "nkg/hmrf.hpp"
#include "nkg/image_io.hpp"
#include "nkg/montecarlo.hpp"
#include "nkg/nakagami.hpp"
#include "nkg/random.hpp"

namespace nkg::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Writes to `path`, or to `fallback` when path is empty or "-".
template <typename F>
void with_output(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

const std::map<std::string, EstimatorKind> kEstimatorNames = [] {
  std::map<std::string, EstimatorKind> m;
  for (auto k : kAllEstimators) m.emplace(std::string(to_string(k)), k);
  return m;
}();

const std::map<std::string, Centrality> kCentralityNames{
    {"mean", Centrality::Mean}, {"median", Centrality::Median}, {"mode", Centrality::Mode}};

const std::map<std::string, hmrf::Likelihood> kLikelihoodNames{
    {"gaussian", hmrf::Likelihood::Gaussian}, {"nakagami", hmrf::Likelihood::Nakagami}};

struct SampleArgs {
  double m = 0.0;
  double omega = 1.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct EstimateArgs {
  std::vector<std::string> inputs;
  EstimatorKind method = EstimatorKind::ExactML;
  RestartPolicy policy{};
};

struct BenchArgs {
  std::string config;
  std::string out;
  std::vector<double> m_grid;
  double omega = 1.0;
  std::size_t block_size = 0, num_blocks = 0, trials = 0;
  std::vector<EstimatorKind> estimators;
  std::uint64_t seed = 0;
  int restarts = 1;
  Centrality centrality = Centrality::Mean;
  double jitter = 0.1;
  unsigned threads = 0;
};

struct BoundsArgs {
  std::vector<double> m_grid;
  std::size_t n = 150;
  std::string out;
};

struct SegmentArgs {
  std::string in;
  int k = 2;
  hmrf::Likelihood likelihood = hmrf::Likelihood::Nakagami;
  hmrf::SegConfig config{};
  std::string out_labels, out_matrix, out_trace;
};

void cmd_sample(const SampleArgs& a, std::ostream& out) {
  const auto block = sample(NakagamiParams::from_omega(a.m, a.omega), a.n, a.seed);
  with_output(a.out, out, [&](std::ostream& os) { io::write_samples(os, block); });
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  BlockEstimatorState state;
  state.method = a.method;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    const SampleBlock block = io::read_samples(a.inputs[i]);
    RestartPolicy policy = a.policy;
    policy.seed = derive_seed(a.policy.seed, i);
    try {
      const Estimate e = estimate_block(a.method, block, policy);
      state = fold(state, e);
      out << "block=" << i + 1 << " file=" << a.inputs[i] << " n=" << block.size() << " m_hat=" << fmt(e.m_hat)
          << " sigma_hat=" << fmt(e.sigma_hat) << " iterations=" << e.iterations << '\n';
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateBlock) throw;
      ++state.blocks_skipped;
      out << "block=" << i + 1 << " file=" << a.inputs[i] << " skipped (" << e.what() << ")\n";
    }
  }
  if (state.blocks_seen == 0) {
    err << "error: all " << a.inputs.size() << " blocks were degenerate; nothing to estimate\n";
    return kExitDomain;
  }
  const Estimate final_estimate = finalize(state);
  out << "m_hat=" << fmt(final_estimate.m_hat) << " sigma_hat=" << fmt(final_estimate.sigma_hat)
      << " blocks=" << state.blocks_seen << " skipped=" << state.blocks_skipped << '\n';
  return kExitOk;
}

void cmd_bench(const BenchArgs& a, const CLI::App& app, std::ostream& out) {
  BenchConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw Error(ErrorKind::Io, "cannot open config '" + a.config + "'");
    cfg = parse_bench_config(in, cfg);
  }
  auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  if (given("--m-grid")) cfg.m_grid = a.m_grid;
  if (given("--omega")) cfg.omega = a.omega;
  if (given("--block-size")) cfg.block_size = a.block_size;
  if (given("--num-blocks")) cfg.num_blocks = a.num_blocks;
  if (given("--trials")) cfg.trials = a.trials;
  if (given("--estimators")) cfg.estimators = a.estimators;
  if (given("--seed")) cfg.base_seed = a.seed;
  if (given("--restarts")) cfg.restart_policy.restarts = a.restarts;
  if (given("--centrality")) cfg.restart_policy.centrality = a.centrality;
  if (given("--jitter")) cfg.restart_policy.jitter = a.jitter;
  if (given("--threads")) cfg.threads = a.threads;

  const BenchResult result = run_bench(cfg);
  with_output(a.out, out, [&](std::ostream& os) { emit_csv(result, os); });
}

void cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  if (a.m_grid.empty()) throw UsageError("--m-grid: at least one value is required");
  with_output(a.out, out, [&](std::ostream& os) {
    os << "m,crlb,crlb_modified,normalized_crlb,normalized_crlb_modified\n";
    char buf[256];
    for (double m : a.m_grid) {
      const double c = crlb({m, a.n});
      const double cm = crlb_modified({m, a.n});
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e\n", m, c, cm, normalized(c, m), normalized(cm, m));
      os << buf;
    }
  });
}

void cmd_segment(SegmentArgs a, std::ostream& out) {
  const hmrf::ImageGrid image = io::read_image(a.in);
  const auto result = hmrf::segment(image, a.k, a.likelihood, a.config);

  io::write_label_pgm(a.out_labels, result.labels, a.k);
  std::string matrix_path = a.out_matrix;
  if (matrix_path.empty()) matrix_path = std::filesystem::path(a.out_labels).replace_extension(".txt").string();
  io::write_label_matrix(matrix_path, result.labels);
  if (!a.out_trace.empty()) {
    with_output(a.out_trace, out, [&](std::ostream& os) { io::write_trace_csv(os, result.trace); });
  }
  out << "energy=" << fmt(result.trace.back().energy) << " sweeps=" << result.sweeps
      << " iterations=" << result.iterations << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nakagami-m estimation, bounds, benchmarks and HMRF segmentation", "nkg"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Draw Nakagami-m samples, one per line");
  sample_cmd->add_option("--m", sample_args.m, "Shape m")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--omega", sample_args.omega, "Spread Omega = E[x^2]")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--n", sample_args.n, "Number of samples")->required()->check(CLI::Range(std::size_t{1}, SIZE_MAX));
  sample_cmd->add_option("--seed", sample_args.seed, "RNG seed");
  sample_cmd->add_option("--out", sample_args.out, "Output file (default stdout)");

  EstimateArgs est_args;
  std::string est_method = "exact_ml";
  std::string est_centrality = "mean";
  auto* est_cmd = app.add_subcommand("estimate", "Estimate m block by block with recursive-mean smoothing");
  est_cmd->add_option("--in", est_args.inputs, "Sample files, one block each")->required();
  est_cmd->add_option("--method", est_method, "Estimator")->check(CLI::IsMember(kEstimatorNames));
  est_cmd->add_option("--restarts", est_args.policy.restarts, "Solver restarts (exact_ml)")->check(CLI::Range(1, 1 << 20));
  est_cmd->add_option("--centrality", est_centrality, "Restart reduction")->check(CLI::IsMember(kCentralityNames));
  est_cmd->add_option("--jitter", est_args.policy.jitter, "Relative restart jitter")->check(CLI::NonNegativeNumber);
  est_cmd->add_option("--seed", est_args.policy.seed, "Restart jitter seed");

  BenchArgs bench_args;
  std::vector<std::string> bench_estimators;
  std::string bench_centrality = "mean";
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo estimator comparison, CSV output");
  bench_cmd->add_option("--config", bench_args.config, "key = value config file; flags override it");
  bench_cmd->add_option("--out", bench_args.out, "Output CSV (default stdout)");
  bench_cmd->add_option("--m-grid", bench_args.m_grid, "True shapes")->delimiter(',')->check(CLI::PositiveNumber);
  bench_cmd->add_option("--omega", bench_args.omega, "True Omega")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--block-size", bench_args.block_size, "Samples per block")->check(CLI::Range(std::size_t{2}, SIZE_MAX));
  bench_cmd->add_option("--num-blocks", bench_args.num_blocks, "Blocks per trial")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
  bench_cmd->add_option("--trials", bench_args.trials, "Trials per grid point")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
  bench_cmd->add_option("--estimators", bench_estimators, "Estimators")->delimiter(',')->check(CLI::IsMember(kEstimatorNames));
  bench_cmd->add_option("--seed", bench_args.seed, "Base seed");
  bench_cmd->add_option("--restarts", bench_args.restarts, "Solver restarts")->check(CLI::Range(1, 1 << 20));
  bench_cmd->add_option("--centrality", bench_centrality, "Restart reduction")->check(CLI::IsMember(kCentralityNames));
  bench_cmd->add_option("--jitter", bench_args.jitter, "Relative restart jitter")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--threads", bench_args.threads, "Worker threads (0 = all cores)");

  BoundsArgs bounds_args;
  auto* bounds_cmd = app.add_subcommand("bounds", "CRLB and modified bound table, CSV output");
  bounds_cmd->add_option("--m-grid", bounds_args.m_grid, "Shapes")->required()->delimiter(',')->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--n", bounds_args.n, "Sample count N")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
  bounds_cmd->add_option("--out", bounds_args.out, "Output CSV (default stdout)");

  SegmentArgs seg_args;
  std::string seg_likelihood = "nakagami";
  auto* seg_cmd = app.add_subcommand("segment", "HMRF segmentation of a grayscale image");
  seg_cmd->add_option("--in", seg_args.in, "Input image (.pgm or text matrix)")->required();
  seg_cmd->add_option("--k", seg_args.k, "Number of classes")->check(CLI::Range(2, 255));
  seg_cmd->add_option("--likelihood", seg_likelihood, "gaussian or nakagami")->check(CLI::IsMember(kLikelihoodNames));
  seg_cmd->add_option("--beta", seg_args.config.beta, "Clique weight")->check(CLI::NonNegativeNumber);
  seg_cmd->add_option("--seed", seg_args.config.seed, "k-means seed");
  seg_cmd->add_option("--max-iterations", seg_args.config.max_iterations, "Outer iterations")->check(CLI::Range(1, 100000));
  seg_cmd->add_option("--max-sweeps", seg_args.config.max_sweeps, "ICM sweeps per iteration")->check(CLI::Range(1, 100000));
  seg_cmd->add_option("--out-labels", seg_args.out_labels, "Label PGM")->required();
  seg_cmd->add_option("--out-matrix", seg_args.out_matrix, "Label text matrix (default: labels path with .txt)");
  seg_cmd->add_option("--out-trace", seg_args.out_trace, "Energy trace CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  est_args.method = kEstimatorNames.at(est_method);
  est_args.policy.centrality = kCentralityNames.at(est_centrality);
  for (const auto& name : bench_estimators) bench_args.estimators.push_back(kEstimatorNames.at(name));
  bench_args.centrality = kCentralityNames.at(bench_centrality);
  seg_args.likelihood = kLikelihoodNames.at(seg_likelihood);

  try {
    if (*sample_cmd) {
      cmd_sample(sample_args, out);
    } else if (*est_cmd) {
      return cmd_estimate(est_args, out, err);
    } else if (*bench_cmd) {
      cmd_bench(bench_args, *bench_cmd, out);
    } else if (*bounds_cmd) {
      cmd_bounds(bounds_args, out);
    } else if (*seg_cmd) {
      cmd_segment(seg_args, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidConfig ? kExitUsage : kExitDomain;
  }
  return kExitOk;
}

}  // namespace nkg::cli
