// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace glmc {

/// Parameters of the exponential-decay long-tail construction.
/// Class i keeps round(max_count * decay_mu^i) samples, where decay_mu is
/// derived from the imbalance factor so that the last class holds
/// max_count / imbalance_factor samples.
struct ImbalanceSpec {
  int num_classes = 10;
  int max_count = 5000;
  double imbalance_factor = 1.0;  // N_max / N_min, >= 1
  std::uint64_t seed = 0;

  double decay_mu() const {
    if (num_classes <= 1 || imbalance_factor == 1.0) return 1.0;
    return std::pow(imbalance_factor, -1.0 / (num_classes - 1));
  }

  void validate() const {
    if (num_classes < 1) throw std::invalid_argument("ImbalanceSpec: num_classes must be >= 1");
    if (max_count < 1) throw std::invalid_argument("ImbalanceSpec: max_count must be >= 1");
    if (imbalance_factor < 1.0)
      throw std::invalid_argument("ImbalanceSpec: imbalance_factor must be >= 1");
    if (static_cast<double>(max_count) / imbalance_factor < 1.0)
      throw std::invalid_argument("ImbalanceSpec: max_count/imbalance_factor < 1 (empty tail class)");
  }
};

/// Per-class training counts plus derived frequencies. Single source of truth
/// for every piece of rebalancing math downstream.
struct ClassFrequencyTable {
  std::vector<int> counts;

  ClassFrequencyTable() = default;
  explicit ClassFrequencyTable(std::vector<int> c) : counts(std::move(c)) {
    for (int n : counts)
      if (n < 1) throw std::invalid_argument("ClassFrequencyTable: all counts must be >= 1");
  }

  int num_classes() const { return static_cast<int>(counts.size()); }

  std::size_t total() const {
    std::size_t t = 0;
    for (int n : counts) t += static_cast<std::size_t>(n);
    return t;
  }

  /// r_i = n_i / sum_j n_j
  std::vector<double> frequencies() const {
    std::vector<double> r(counts.size());
    const double t = static_cast<double>(total());
    for (std::size_t i = 0; i < counts.size(); ++i) r[i] = counts[i] / t;
    return r;
  }
};

namespace detail {
inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }
}  // namespace detail

/// counts[i] = round(max_count * mu^i), rounded half-up and floored at 1.
inline std::vector<int> compute_class_counts(const ImbalanceSpec& spec) {
  spec.validate();
  const double mu = spec.decay_mu();
  std::vector<int> counts(spec.num_classes);
  double v = static_cast<double>(spec.max_count);
  for (int i = 0; i < spec.num_classes; ++i) {
    counts[i] = std::max(1, detail::round_half_up(v));
    v *= mu;
  }
  return counts;
}

/// N_max / N_min of an observed table.
inline double imbalance_factor(const ClassFrequencyTable& table) {
  if (table.counts.empty()) throw std::invalid_argument("imbalance_factor: empty table");
  auto [mn, mx] = std::minmax_element(table.counts.begin(), table.counts.end());
  return static_cast<double>(*mx) / static_cast<double>(*mn);
}

}  // namespace glmc
