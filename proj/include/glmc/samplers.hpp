// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "glmc/dataset.hpp"
#include "glmc/longtail.hpp"

namespace glmc {

struct SamplerConfig {
  enum class Mode { kUniform, kReversed };
  Mode mode = Mode::kUniform;
  double resample_k = 0.2;  // inverse-frequency exponent; > 0.4 draws a warning
  std::uint64_t seed = 0;
};

/// Class-level draw probabilities of the reversed sampler.
/// k > 0: p_i proportional to (1/r_i)^k. k = 0 degenerates to uniform over
/// samples, which at class level is p_i = r_i (drawing a class by r_i and a
/// sample uniformly within it makes every sample equally likely).
inline std::vector<double> class_sampling_probs(const ClassFrequencyTable& table, double resample_k) {
  if (resample_k < 0.0) throw std::invalid_argument("class_sampling_probs: k must be >= 0");
  const auto r = table.frequencies();
  if (resample_k == 0.0) return r;
  std::vector<double> p(r.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    p[i] = std::pow(1.0 / r[i], resample_k);
    denom += p[i];
  }
  for (auto& pi : p) pi /= denom;
  return p;
}

/// Draws minibatches from a dataset. Uniform mode samples indices uniformly;
/// reversed mode draws a class from class_sampling_probs and then a sample
/// uniformly within that class, with replacement. Single consumer per
/// instance; each instance owns its RNG stream.
class Sampler {
public:
  Sampler(const LabeledDataset& dataset, SamplerConfig config)
      : dataset_(&dataset), config_(config), rng_(config.seed) {
    if (dataset.size() == 0) throw std::invalid_argument("Sampler: empty dataset");
    if (config.mode == SamplerConfig::Mode::kReversed) {
      if (config.resample_k > 0.4)
        std::cerr << "[glmc] warning: sampler.resample_k=" << config.resample_k
                  << " above the recommended bound 0.4\n";
      class_probs_ = class_sampling_probs(dataset.table, config.resample_k);
      class_dist_ = std::discrete_distribution<int>(class_probs_.begin(), class_probs_.end());
      by_class_.resize(dataset.num_classes);
      for (std::size_t i = 0; i < dataset.labels.size(); ++i)
        by_class_[dataset.labels[i]].push_back(static_cast<int>(i));
    }
  }

  const std::vector<double>& class_probs() const { return class_probs_; }

  std::vector<int> draw_indices(int batch_size) {
    if (batch_size < 1) throw std::invalid_argument("draw_indices: batch_size must be >= 1");
    std::vector<int> idx(batch_size);
    if (config_.mode == SamplerConfig::Mode::kUniform) {
      std::uniform_int_distribution<int> d(0, static_cast<int>(dataset_->size()) - 1);
      for (auto& i : idx) i = d(rng_);
    } else {
      for (auto& i : idx) {
        const int c = class_dist_(rng_);
        std::uniform_int_distribution<int> within(0, static_cast<int>(by_class_[c].size()) - 1);
        i = by_class_[c][within(rng_)];
      }
    }
    return idx;
  }

  Batch draw_batch(int batch_size) { return materialize(draw_indices(batch_size)); }

  Batch materialize(const std::vector<int>& indices) const {
    const auto& ds = *dataset_;
    Batch b;
    b.images = Tensor({indices.size(), ds.channels, ds.height, ds.width});
    b.labels.resize(indices.size());
    b.weights.resize(indices.size());
    const std::size_t px = ds.channels * ds.height * ds.width;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      std::copy_n(ds.images.data() + static_cast<std::size_t>(indices[i]) * px, px,
                  b.images.data() + i * px);
      b.labels[i] = ds.labels[indices[i]];
      b.weights[i] = ds.sample_weights[indices[i]];
    }
    return b;
  }

private:
  const LabeledDataset* dataset_;
  SamplerConfig config_;
  Rng rng_;
  std::vector<double> class_probs_;
  std::discrete_distribution<int> class_dist_;
  std::vector<std::vector<int>> by_class_;
};

}  // namespace glmc
