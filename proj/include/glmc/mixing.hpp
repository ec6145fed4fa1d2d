// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "glmc/dataset.hpp"
#include "glmc/tensor.hpp"

namespace glmc {

struct MixingConfig {
  double beta = 1.0;                    // Beta(beta, beta) shape for lambda
  bool share_lambda_across_views = true;
  bool area_correct_lambda = false;     // recompute lambda from the clipped box area
  std::uint64_t seed = 0;
  std::optional<double> forced_lambda;  // pin lambda (baseline-equivalence runs)
};

/// lambda ~ Beta(beta, beta) via the two-gamma construction.
inline double sample_lambda(double beta, Rng& rng) {
  if (beta <= 0.0) throw std::invalid_argument("sample_lambda: beta must be > 0");
  std::gamma_distribution<double> g(beta, 1.0);
  const double a = g(rng), b = g(rng);
  if (a + b == 0.0) return 0.5;
  return a / (a + b);
}

/// Cut rectangle. r_* are the sampled continuous coordinates (extents are the
/// pre-clip values W*sqrt(1-lambda), H*sqrt(1-lambda)); x0/y0..x1/y1 is the
/// rasterized pixel region [x0,x1) x [y0,y1) after clipping to the image.
struct CutBox {
  double r_x = 0, r_y = 0, r_w = 0, r_h = 0;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  long pixel_area() const { return static_cast<long>(x1 - x0) * (y1 - y0); }
};

/// Rasterizes a box with top-left (rx, ry) and the Eq.-style extents for the
/// given lambda.
inline CutBox make_cutbox(std::size_t width, std::size_t height, double lambda, double rx, double ry) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("make_cutbox: lambda outside [0,1]");
  CutBox b;
  b.r_x = rx;
  b.r_y = ry;
  b.r_w = width * std::sqrt(1.0 - lambda);
  b.r_h = height * std::sqrt(1.0 - lambda);
  const int w = static_cast<int>(width), h = static_cast<int>(height);
  b.x0 = std::clamp(static_cast<int>(std::floor(rx)), 0, w);
  b.y0 = std::clamp(static_cast<int>(std::floor(ry)), 0, h);
  const int span_x = static_cast<int>(std::floor(b.r_w + 0.5));
  const int span_y = static_cast<int>(std::floor(b.r_h + 0.5));
  b.x1 = std::min(w, b.x0 + span_x);
  b.y1 = std::min(h, b.y0 + span_y);
  return b;
}

/// r_x ~ U(0,W), r_y ~ U(0,H); extents W*sqrt(1-lambda), H*sqrt(1-lambda).
inline CutBox sample_cutbox(std::size_t width, std::size_t height, double lambda, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, static_cast<double>(width));
  std::uniform_real_distribution<double> uy(0.0, static_cast<double>(height));
  return make_cutbox(width, height, lambda, ux(rng), uy(rng));
}

/// Paired global/local views of one head-tail batch. Both views carry the
/// same mixed label rows and the same mixed per-row weights.
struct MixedBatch {
  Tensor x_global;             // mixup view (N,C,H,W)
  Tensor x_local;              // cutmix view (N,C,H,W)
  Tensor p_mixed;              // (N, num_classes), rows sum to 1
  std::vector<float> w_mixed;  // per-row mixed weight
  double lambda = 1.0;
  CutBox box;                  // box used by the local view
};

namespace detail {

inline void check_same_geometry(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

inline Tensor mix_probs(const std::vector<int>& yi, const std::vector<int>& yj, int num_classes,
                        double lambda) {
  Tensor p({yi.size(), static_cast<std::size_t>(num_classes)});
  for (std::size_t r = 0; r < yi.size(); ++r) {
    p.at2(r, yi[r]) += static_cast<float>(lambda);
    p.at2(r, yj[r]) += static_cast<float>(1.0 - lambda);
  }
  return p;
}

inline std::vector<float> mix_weights(const std::vector<float>& wi, const std::vector<float>& wj,
                                      double lambda) {
  std::vector<float> w(wi.size());
  for (std::size_t r = 0; r < wi.size(); ++r)
    w[r] = static_cast<float>(lambda * wi[r] + (1.0 - lambda) * wj[r]);
  return w;
}

}  // namespace detail

/// x_tilde = lambda*x_i + (1-lambda)*x_j, elementwise over the whole batch.
inline Tensor mixup_images(const Tensor& xi, const Tensor& xj, double lambda) {
  detail::check_same_geometry(xi, xj, "mixup");
  Tensor out(xi.shape());
  const float l = static_cast<float>(lambda), m = static_cast<float>(1.0 - lambda);
  const float* a = xi.data();
  const float* b = xj.data();
  float* o = out.data();
  for (std::size_t i = 0, n = xi.count(); i < n; ++i) o[i] = l * a[i] + m * b[i];
  return out;
}

/// Pixels inside the box come from x_j, outside from x_i, so x_i retains
/// fraction lambda when the box is unclipped.
inline Tensor cutmix_images(const Tensor& xi, const Tensor& xj, const CutBox& box) {
  detail::check_same_geometry(xi, xj, "cutmix");
  Tensor out = xi;
  const std::size_t n = xi.dim(0), ch = xi.dim(1), h = xi.dim(2), w = xi.dim(3);
  for (std::size_t img = 0; img < n; ++img)
    for (std::size_t c = 0; c < ch; ++c)
      for (int y = box.y0; y < box.y1; ++y) {
        const std::size_t base = ((img * ch + c) * h + y) * w;
        for (int x = box.x0; x < box.x1; ++x) out[base + x] = xj[base + x];
      }
  return out;
}

struct MixResult {
  Tensor x;
  Tensor p;  // (N, num_classes)
  std::vector<float> w;
};

inline MixResult mixup(const Tensor& xi, const Tensor& xj, const std::vector<int>& yi,
                       const std::vector<int>& yj, const std::vector<float>& wi,
                       const std::vector<float>& wj, int num_classes, double lambda) {
  if (yi.size() != yj.size() || wi.size() != wj.size() || yi.size() != xi.dim(0))
    throw std::invalid_argument("mixup: batch size mismatch");
  return {mixup_images(xi, xj, lambda), detail::mix_probs(yi, yj, num_classes, lambda),
          detail::mix_weights(wi, wj, lambda)};
}

/// Labels and weights mix with the same lambda as mixup; only pixels differ.
inline MixResult cutmix(const Tensor& xi, const Tensor& xj, const std::vector<int>& yi,
                        const std::vector<int>& yj, const std::vector<float>& wi,
                        const std::vector<float>& wj, int num_classes, double lambda,
                        const CutBox& box) {
  if (yi.size() != yj.size() || wi.size() != wj.size() || yi.size() != xi.dim(0))
    throw std::invalid_argument("cutmix: batch size mismatch");
  return {cutmix_images(xi, xj, box), detail::mix_probs(yi, yj, num_classes, lambda),
          detail::mix_weights(wi, wj, lambda)};
}

inline MixResult cutmix(const Tensor& xi, const Tensor& xj, const std::vector<int>& yi,
                        const std::vector<int>& yj, const std::vector<float>& wi,
                        const std::vector<float>& wj, int num_classes, double lambda, Rng& rng) {
  return cutmix(xi, xj, yi, yj, wi, wj, num_classes, lambda,
                sample_cutbox(xi.dim(3), xi.dim(2), lambda, rng));
}

/// One lambda per batch, shared by both views; row i of the uniform batch is
/// mixed with row i of the reversed batch. Both views get identical p_mixed
/// and w_mixed.
inline MixedBatch make_mixed_batch(const Batch& uniform_batch, const Batch& reversed_batch,
                                   int num_classes, const MixingConfig& config, Rng& rng) {
  if (uniform_batch.size() != reversed_batch.size())
    throw std::invalid_argument("make_mixed_batch: batch size mismatch");
  MixedBatch out;
  out.lambda = config.forced_lambda ? *config.forced_lambda : sample_lambda(config.beta, rng);
  out.box = sample_cutbox(uniform_batch.images.dim(3), uniform_batch.images.dim(2), out.lambda, rng);
  double label_lambda = out.lambda;
  if (config.area_correct_lambda) {
    const double total = static_cast<double>(uniform_batch.images.dim(2) * uniform_batch.images.dim(3));
    label_lambda = 1.0 - out.box.pixel_area() / total;
  }
  out.x_global = mixup_images(uniform_batch.images, reversed_batch.images, out.lambda);
  out.x_local = cutmix_images(uniform_batch.images, reversed_batch.images, out.box);
  out.p_mixed = detail::mix_probs(uniform_batch.labels, reversed_batch.labels, num_classes, label_lambda);
  out.w_mixed = detail::mix_weights(uniform_batch.weights, reversed_batch.weights, label_lambda);
  return out;
}

}  // namespace glmc
