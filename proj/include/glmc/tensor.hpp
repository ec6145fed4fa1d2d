// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace glmc {

/// Dense row-major tensor. Images use NCHW layout throughout.
template <typename Scalar>
class TensorT {
public:
  TensorT() = default;
  explicit TensorT(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    data_.assign(count(), Scalar(0));
  }
  TensorT(std::vector<std::size_t> shape, Scalar fill) : shape_(std::move(shape)) {
    data_.assign(count(), fill);
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t count() const {
    return std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                           std::multiplies<>());
  }
  bool empty() const { return data_.empty(); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  Scalar& operator[](std::size_t i) { return data_[i]; }
  Scalar operator[](std::size_t i) const { return data_[i]; }

  Scalar& at4(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  Scalar at4(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  Scalar& at2(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  Scalar at2(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  void fill(Scalar v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(Scalar(0)); }

  void reshape(std::vector<std::size_t> shape) {
    std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                    std::multiplies<>());
    if (n != count()) throw std::invalid_argument("reshape: element count mismatch");
    shape_ = std::move(shape);
  }

  /// Resize, discarding contents (kept zeroed only when the size grows).
  void resize(std::vector<std::size_t> shape) {
    shape_ = std::move(shape);
    data_.assign(count(), Scalar(0));
  }

  bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

  bool all_finite() const {
    for (Scalar v : data_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

private:
  std::vector<std::size_t> shape_;
  std::vector<Scalar> data_;
};

using Tensor = TensorT<float>;

using Rng = std::mt19937_64;

/// Stable stream derivation so each component owns an independent RNG.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 over (master ^ rotated stream tag)
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a, used for content hashes in dataset manifests and encoder digests.
inline std::uint64_t fnv1a(const void* bytes, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string shape_string(const std::vector<std::size_t>& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(s[i]);
    if (i + 1 < s.size()) out += ",";
  }
  return out + ")";
}

}  // namespace glmc
