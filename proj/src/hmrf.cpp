#include "nkg/hmrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "nkg/blockwise.hpp"
#include "nkg/error.hpp"
#include "nkg/estimators.hpp"
#include "nkg/random.hpp"

namespace nkg::hmrf {

ImageGrid::ImageGrid(std::size_t w, std::size_t h, std::vector<double> px) : width(w), height(h), pixels(std::move(px)) {
  if (w == 0 || h == 0) throw Error(ErrorKind::Domain, "image dimensions must be positive");
  if (pixels.size() != w * h) throw Error(ErrorKind::Domain, "pixel count does not match width * height");
  for (double v : pixels) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::Domain, "pixel intensities must be finite and >= 0");
  }
}

LabelField::LabelField(std::size_t w, std::size_t h, std::vector<int> l) : width(w), height(h), labels(std::move(l)) {
  if (labels.size() != w * h) throw Error(ErrorKind::Domain, "label count does not match width * height");
}

std::string_view to_string(Likelihood l) noexcept {
  return l == Likelihood::Gaussian ? "gaussian" : "nakagami";
}

double SegModel::class_log_likelihood(int k, double y) const {
  if (likelihood == Likelihood::Gaussian) {
    const auto& g = gaussian[static_cast<std::size_t>(k)];
    const double d = y - g.mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * g.variance) - 0.5 * d * d / g.variance;
  }
  if (!(y > 0.0)) throw Error(ErrorKind::Domain, "Nakagami likelihood requires positive intensities");
  return log_pdf(nakagami[static_cast<std::size_t>(k)], y);
}

void SegModel::validate() const {
  if (K < 2) throw Error(ErrorKind::Domain, "segmentation needs K >= 2");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::Domain, "beta must be finite and >= 0");
  const auto k = static_cast<std::size_t>(K);
  if (likelihood == Likelihood::Gaussian) {
    if (gaussian.size() != k) throw Error(ErrorKind::Domain, "model needs K Gaussian parameter sets");
    for (const auto& g : gaussian) {
      if (!std::isfinite(g.mean) || !(g.variance > 0.0)) throw Error(ErrorKind::Domain, "invalid Gaussian parameters");
    }
  } else if (nakagami.size() != k) {
    throw Error(ErrorKind::Domain, "model needs K Nakagami parameter sets");
  }
}

namespace {

void check_labels(const ImageGrid& image, const LabelField& labels, int K) {
  if (labels.width != image.width || labels.height != image.height) {
    throw Error(ErrorKind::Domain, "label field and image dimensions differ");
  }
  for (int l : labels.labels) {
    if (l < 0 || l >= K) throw Error(ErrorKind::Domain, "label outside [0, K)");
  }
}

template <typename F>
void for_each_neighbour(const LabelField& f, std::size_t idx, F&& fn) {
  const std::size_t r = idx / f.width;
  const std::size_t c = idx % f.width;
  if (r > 0) fn(f.labels[idx - f.width]);
  if (r + 1 < f.height) fn(f.labels[idx + f.width]);
  if (c > 0) fn(f.labels[idx - 1]);
  if (c + 1 < f.width) fn(f.labels[idx + 1]);
}

int disagreements(const LabelField& f, std::size_t idx, int k) {
  int count = 0;
  for_each_neighbour(f, idx, [&](int other) { count += other != k; });
  return count;
}

}  // namespace

LabelField kmeans_init(const ImageGrid& image, int K, std::uint64_t seed) {
  if (K < 2) throw Error(ErrorKind::Domain, "k-means needs K >= 2");
  const std::set<double> distinct(image.pixels.begin(), image.pixels.end());
  if (distinct.size() < static_cast<std::size_t>(K)) {
    throw Error(ErrorKind::Domain, "image has " + std::to_string(distinct.size()) + " distinct intensities, fewer than K=" +
                                       std::to_string(K));
  }
  const auto& y = image.pixels;
  const std::size_t n = y.size();
  const auto k = static_cast<std::size_t>(K);

  // k-means++ seeding.
  Rng rng(seed);
  std::vector<double> centres;
  centres.push_back(y[std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)))]);
  std::vector<double> d2(n);
  while (centres.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centres) best = std::min(best, (y[i] - c) * (y[i] - c));
      d2[i] = best;
      total += best;
    }
    double target = rng.uniform() * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= d2[i];
      if (target < 0.0 && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    centres.push_back(y[pick]);
  }

  std::vector<int> assign(n, -1);
  auto nearest = [&](double v) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (std::abs(v - centres[c]) < std::abs(v - centres[best])) best = c;
    }
    return static_cast<int>(best);
  };
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = nearest(y[i]);
      changed |= a != assign[i];
      assign[i] = a;
    }
    if (!changed) break;
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[static_cast<std::size_t>(assign[i])] += y[i];
      count[static_cast<std::size_t>(assign[i])]++;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) {
        centres[c] = sum[c] / static_cast<double>(count[c]);
        continue;
      }
      // Empty cluster: move it to the worst-served pixel.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(y[i] - centres[static_cast<std::size_t>(assign[i])]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centres[c] = y[far];
    }
  }

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return centres[a] < centres[b]; });
  std::vector<int> rank(k);
  for (std::size_t r = 0; r < k; ++r) rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  for (auto& a : assign) a = rank[static_cast<std::size_t>(a)];
  return LabelField(image.width, image.height, std::move(assign));
}

double total_energy(const ImageGrid& image, const LabelField& labels, const SegModel& model) {
  check_labels(image, labels, model.K);
  double data = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) data -= model.class_log_likelihood(labels.labels[i], image.pixels[i]);
  double pairs = 0.0;
  for (std::size_t r = 0; r < labels.height; ++r) {
    for (std::size_t c = 0; c < labels.width; ++c) {
      const std::size_t i = r * labels.width + c;
      if (c + 1 < labels.width) pairs += clique_potential(labels.labels[i], labels.labels[i + 1]);
      if (r + 1 < labels.height) pairs += clique_potential(labels.labels[i], labels.labels[i + labels.width]);
    }
  }
  return data + model.beta * pairs;
}

SweepResult icm_sweep(const ImageGrid& image, LabelField labels, const SegModel& model) {
  check_labels(image, labels, model.K);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const int current = labels.labels[i];
    auto local = [&](int k) {
      return -model.class_log_likelihood(k, image.pixels[i]) + model.beta * disagreements(labels, i, k);
    };
    int best = current;
    double best_u = local(current);
    for (int k = 0; k < model.K; ++k) {
      if (k == current) continue;
      const double u = local(k);
      if (u < best_u) {
        best_u = u;
        best = k;
      }
    }
    if (best != current) {
      labels.labels[i] = best;
      ++changed;
    }
  }
  return {std::move(labels), changed};
}

std::vector<double> soft_prior_update(const LabelField& labels, const SegModel& model) {
  const auto k = static_cast<std::size_t>(model.K);
  std::vector<double> probs(labels.size() * k);
  std::vector<double> w(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    // Shift by the smallest disagreement count so exp never underflows to 0/0.
    int min_d = std::numeric_limits<int>::max();
    std::vector<int> d(k);
    for (std::size_t c = 0; c < k; ++c) {
      d[c] = disagreements(labels, i, static_cast<int>(c));
      min_d = std::min(min_d, d[c]);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      w[c] = std::exp(-model.beta * (d[c] - min_d));
      z += w[c];
    }
    for (std::size_t c = 0; c < k; ++c) probs[i * k + c] = w[c] / z;
  }
  return probs;
}

namespace {

std::optional<NakagamiParams> fit_nakagami(const std::vector<double>& values, const ParamUpdateOptions& options) {
  if (values.size() < 2) return std::nullopt;
  const std::size_t chunk = options.nakagami_chunk == 0 ? values.size() : std::max<std::size_t>(options.nakagami_chunk, 2);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t start = 0; start < values.size(); start += chunk) {
    ranges.emplace_back(start, std::min(values.size(), start + chunk));
  }
  if (ranges.size() > 1 && ranges.back().second - ranges.back().first < options.nakagami_min_tail) {
    ranges[ranges.size() - 2].second = ranges.back().second;
    ranges.pop_back();
  }
  BlockEstimatorState state;
  state.method = EstimatorKind::ExactML;
  for (const auto& [begin, end] : ranges) {
    try {
      state = ingest_block(state, SampleBlock({values.begin() + static_cast<std::ptrdiff_t>(begin),
                                               values.begin() + static_cast<std::ptrdiff_t>(end)}));
    } catch (const Error&) {
      // Unsolvable chunk: leave it out of the running mean.
    }
  }
  if (state.blocks_seen == 0) return std::nullopt;
  const Estimate e = finalize(state);
  return NakagamiParams(e.m_hat, e.sigma_hat);
}

}  // namespace

ParamUpdate update_params(const ImageGrid& image, const LabelField& labels, const SegModel& model,
                          const ParamUpdateOptions& options) {
  check_labels(image, labels, model.K);
  ParamUpdate out{model, {}};
  const auto k = static_cast<std::size_t>(model.K);

  std::vector<std::vector<double>> members(k);
  for (std::size_t i = 0; i < image.size(); ++i) members[static_cast<std::size_t>(labels.labels[i])].push_back(image.pixels[i]);

  if (model.likelihood == Likelihood::Nakagami) {
    for (std::size_t c = 0; c < k; ++c) {
      if (auto fitted = fit_nakagami(members[c], options)) {
        out.model.nakagami[c] = *fitted;
      } else {
        out.starved.push_back(static_cast<int>(c));
      }
    }
    return out;
  }

  std::vector<double> weights;
  if (options.soft_gaussian) weights = soft_prior_update(labels, model);
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].size() < 2) {
      out.starved.push_back(static_cast<int>(c));
      continue;
    }
    double mean = 0.0;
    double var = 0.0;
    if (options.soft_gaussian) {
      double wsum = 0.0;
      for (std::size_t i = 0; i < image.size(); ++i) {
        wsum += weights[i * k + c];
        mean += weights[i * k + c] * image.pixels[i];
      }
      mean /= wsum;
      for (std::size_t i = 0; i < image.size(); ++i) {
        const double d = image.pixels[i] - mean;
        var += weights[i * k + c] * d * d;
      }
      var /= wsum;
    } else {
      for (double v : members[c]) mean += v;
      mean /= static_cast<double>(members[c].size());
      for (double v : members[c]) var += (v - mean) * (v - mean);
      var /= static_cast<double>(members[c].size() - 1);
    }
    if (!(var > 0.0)) {
      out.starved.push_back(static_cast<int>(c));
      out.model.gaussian[c].mean = mean;
      continue;
    }
    out.model.gaussian[c] = {mean, var};
  }
  return out;
}

ImageGrid with_positive_floor(const ImageGrid& image, double floor_fraction) {
  const double max = *std::max_element(image.pixels.begin(), image.pixels.end());
  if (!(max > 0.0)) throw Error(ErrorKind::Domain, "Nakagami likelihood needs an image with a non-zero pixel");
  const double floor = floor_fraction * max;
  ImageGrid out = image;
  for (auto& v : out.pixels) {
    if (v <= 0.0) v = floor;
  }
  return out;
}

namespace {

// Starting parameters for classes straight out of k-means. Degenerate classes
// (constant intensity) get a narrow but finite distribution at that level.
SegModel initial_model(const ImageGrid& image, const LabelField& labels, int K, Likelihood likelihood,
                       const SegConfig& config) {
  constexpr double kDegenerateShape = 100.0;
  SegModel model;
  model.K = K;
  model.likelihood = likelihood;
  model.beta = config.beta;
  model.max_sweeps = config.max_sweeps;

  const auto k = static_cast<std::size_t>(K);
  std::vector<std::vector<double>> members(k);
  for (std::size_t i = 0; i < image.size(); ++i) members[static_cast<std::size_t>(labels.labels[i])].push_back(image.pixels[i]);

  double gmean = 0.0;
  for (double v : image.pixels) gmean += v;
  gmean /= static_cast<double>(image.size());
  double gvar = 0.0;
  for (double v : image.pixels) gvar += (v - gmean) * (v - gmean);
  gvar /= static_cast<double>(image.size());
  const double var_floor = std::max(gvar, 1e-300) * 1e-6;

  for (std::size_t c = 0; c < k; ++c) {
    const auto& v = members[c];
    double mean = gmean;
    double var = gvar;
    double mean_sq = gmean * gmean + gvar;
    if (!v.empty()) {
      mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      var = 0.0;
      mean_sq = 0.0;
      for (double x : v) {
        var += (x - mean) * (x - mean);
        mean_sq += x * x;
      }
      var /= static_cast<double>(std::max<std::size_t>(v.size() - 1, 1));
      mean_sq /= static_cast<double>(v.size());
    }
    if (likelihood == Likelihood::Gaussian) {
      model.gaussian.push_back({mean, std::max(var, var_floor)});
    } else {
      auto fitted = fit_nakagami(v, config.update);
      model.nakagami.push_back(fitted ? *fitted : NakagamiParams::from_omega(kDegenerateShape, mean_sq));
    }
  }
  return model;
}

double relative_change(double before, double after) {
  return std::abs(after - before) / std::max(std::abs(before), 1e-300);
}

double parameter_change(const SegModel& a, const SegModel& b) {
  double worst = 0.0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(a.K); ++c) {
    if (a.likelihood == Likelihood::Gaussian) {
      worst = std::max({worst, relative_change(a.gaussian[c].mean, b.gaussian[c].mean),
                        relative_change(a.gaussian[c].variance, b.gaussian[c].variance)});
    } else {
      worst = std::max({worst, relative_change(a.nakagami[c].m(), b.nakagami[c].m()),
                        relative_change(a.nakagami[c].sigma(), b.nakagami[c].sigma())});
    }
  }
  return worst;
}

}  // namespace

SegResult segment(const ImageGrid& input, int K, Likelihood likelihood, const SegConfig& config) {
  if (K < 2) throw Error(ErrorKind::Domain, "segmentation needs K >= 2");
  const ImageGrid image = likelihood == Likelihood::Nakagami ? with_positive_floor(input, config.zero_floor_fraction) : input;

  SegResult result;
  result.labels = kmeans_init(image, K, config.seed);
  result.model = initial_model(image, result.labels, K, likelihood, config);
  result.model.validate();
  result.trace.push_back({0, "init", total_energy(image, result.labels, result.model)});

  for (int it = 1; it <= config.max_iterations; ++it) {
    result.iterations = it;
    const SegModel previous = result.model;
    if (it > 1) {
      result.model = update_params(image, result.labels, result.model, config.update).model;
      result.trace.push_back({it, "params", total_energy(image, result.labels, result.model)});
    }
    std::size_t changed_total = 0;
    for (int s = 0; s < config.max_sweeps; ++s) {
      auto sweep = icm_sweep(image, std::move(result.labels), result.model);
      result.labels = std::move(sweep.labels);
      ++result.sweeps;
      changed_total += sweep.changed;
      result.trace.push_back({it, "icm", total_energy(image, result.labels, result.model)});
      if (sweep.changed == 0) break;
    }
    if (it > 1 && changed_total == 0 && parameter_change(previous, result.model) < config.tolerance) break;
  }
  return result;
}

double pixel_accuracy(const LabelField& predicted, const LabelField& truth, int K) {
  if (predicted.size() != truth.size() || predicted.size() == 0) {
    throw Error(ErrorKind::Domain, "label fields differ in size");
  }
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      hits += perm[static_cast<std::size_t>(predicted.labels[i])] == truth.labels[i];
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

}  // namespace nkg::hmrf
