#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nkg/nakagami.hpp"

namespace nkg::hmrf {

/// Row-major grayscale intensities, all >= 0.
struct ImageGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  ImageGrid() = default;
  ImageGrid(std::size_t w, std::size_t h, std::vector<double> px);

  std::size_t size() const noexcept { return pixels.size(); }
  double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

/// Row-major labels in [0, K).
struct LabelField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<int> labels;

  LabelField() = default;
  LabelField(std::size_t w, std::size_t h, std::vector<int> l);

  std::size_t size() const noexcept { return labels.size(); }
  bool operator==(const LabelField&) const = default;
};

enum class Likelihood { Gaussian, Nakagami };

std::string_view to_string(Likelihood l) noexcept;

struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;
};

struct SegModel {
  int K = 2;
  Likelihood likelihood = Likelihood::Gaussian;
  std::vector<GaussianParams> gaussian;  // used when likelihood == Gaussian
  std::vector<NakagamiParams> nakagami;  // used when likelihood == Nakagami
  double beta = 1.0;
  int max_sweeps = 20;

  /// log f(y | class k); -inf outside the support.
  double class_log_likelihood(int k, double y) const;
  void validate() const;
};

/// 1-D k-means on intensities (k-means++ seeding), classes relabeled so
/// centres increase with the label index.
LabelField kmeans_init(const ImageGrid& image, int K, std::uint64_t seed);

/// Potts pair potential: 0 if equal, 1 otherwise.
constexpr double clique_potential(int a, int b) noexcept { return a == b ? 0.0 : 1.0; }

/// U = -sum_i log f(y_i | x_i) + beta * sum over 4-neighbour pairs of V(x_a, x_b),
/// each unordered pair counted once.
double total_energy(const ImageGrid& image, const LabelField& labels, const SegModel& model);

struct SweepResult {
  LabelField labels;
  std::size_t changed = 0;
};

/// One raster-order ICM pass. Each pixel takes the label minimising its local
/// energy against the current (already updated) neighbours; the current label
/// wins ties, so the total energy never increases.
SweepResult icm_sweep(const ImageGrid& image, LabelField labels, const SegModel& model);

struct ParamUpdateOptions {
  /// Class pixels are split into blocks of this size for the recursive-mean
  /// estimator; 0 fits each class as a single block. Averaging many small
  /// blocks carries the small-sample ML bias into the class parameters.
  std::size_t nakagami_chunk = 0;
  std::size_t nakagami_min_tail = 10;
  /// Weight Gaussian updates by soft_prior_update instead of hard labels.
  bool soft_gaussian = false;
};

struct ParamUpdate {
  SegModel model;
  std::vector<int> starved;  // classes whose parameters were kept
};

/// Re-estimates each class from its pixels. Gaussian: sample mean and
/// (n - 1) variance. Nakagami: recursive-mean ML over raster-order chunks of
/// the class's pixels (see ParamUpdateOptions::nakagami_chunk). Classes with < 2 pixels or a degenerate sample
/// keep their previous parameters and are listed in `starved`.
ParamUpdate update_params(const ImageGrid& image, const LabelField& labels, const SegModel& model,
                          const ParamUpdateOptions& options = {});

/// Per-pixel label probabilities from the neighbourhood prior alone:
/// p(k) proportional to exp(-beta * #neighbours with label != k). Row-major,
/// K entries per pixel.
std::vector<double> soft_prior_update(const LabelField& labels, const SegModel& model);

struct SegConfig {
  double beta = 1.0;
  int max_sweeps = 20;
  int max_iterations = 20;
  double tolerance = 1e-4;  // relative parameter change that stops the outer loop
  std::uint64_t seed = 0;
  ParamUpdateOptions update{};
  /// Zeros are raised to this fraction of the maximum intensity before
  /// Nakagami likelihoods are evaluated.
  double zero_floor_fraction = 1e-6;
};

struct TraceEntry {
  int iteration = 0;
  std::string phase;  // "init", "params" or "icm"
  double energy = 0.0;
};

struct SegResult {
  LabelField labels;
  SegModel model;
  std::vector<TraceEntry> trace;
  int iterations = 0;
  int sweeps = 0;
};

/// k-means init, then alternate parameter updates with ICM sweeps until the
/// labels stop changing and the parameters settle, or the budgets run out.
SegResult segment(const ImageGrid& image, int K, Likelihood likelihood, const SegConfig& config = {});

/// Copy of `image` with zeros raised to floor_fraction * max. Throws
/// Error(Domain) for an all-zero image.
ImageGrid with_positive_floor(const ImageGrid& image, double floor_fraction);

/// Fraction of pixels that agree after the best relabeling of `predicted`.
double pixel_accuracy(const LabelField& predicted, const LabelField& truth, int K);

}  // namespace nkg::hmrf
