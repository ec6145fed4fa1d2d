// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "glmc/longtail.hpp"

namespace glmc {

/// Knobs of the cumulative class-balanced objective.
struct RebalanceConfig {
  double reweight_k = 1.0;  // exponent of the inverse-frequency weights
  double gamma = 10.0;      // consistency-loss weight
};

/// w_i = C * (1/r_i)^k / sum_j (1/r_j)^k. Sums to C; k = 0 gives all ones.
inline std::vector<double> class_weights(const ClassFrequencyTable& table, double k) {
  if (k < 0.0) throw std::invalid_argument("class_weights: k must be >= 0");
  const auto r = table.frequencies();
  const int c = table.num_classes();
  std::vector<double> w(r.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    w[i] = std::pow(1.0 / r[i], k);
    denom += w[i];
  }
  for (auto& wi : w) wi = c * wi / denom;
  return w;
}

/// alpha(T) = 1 - (T / t_max)^2, evaluated at epoch start.
inline double alpha(int epoch, int t_max) {
  if (t_max < 1) throw std::invalid_argument("alpha: t_max must be >= 1");
  if (epoch < 0 || epoch > t_max) throw std::invalid_argument("alpha: epoch out of [0, t_max]");
  const double t = static_cast<double>(epoch) / static_cast<double>(t_max);
  return 1.0 - t * t;
}

/// Epoch-indexed alpha accessor.
struct CumulativeSchedule {
  int t_max = 1;
  double operator()(int epoch) const { return alpha(epoch, t_max); }
};

}  // namespace glmc
