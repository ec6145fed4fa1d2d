// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glmc/longtail.hpp"
#include "glmc/tensor.hpp"

namespace glmc {

/// In-memory labeled image dataset, NCHW float pixels in [0,1].
/// sample_weights is the per-sample weight slot of the training tuples
/// (x_i, y_i, w_i); it defaults to 1 and is filled in by the trainer from the
/// class-weight vector.
struct LabeledDataset {
  std::size_t channels = 3, height = 32, width = 32;
  int num_classes = 0;
  Tensor images;                      // (N, C, H, W)
  std::vector<int> labels;            // N
  std::vector<float> sample_weights;  // N
  ClassFrequencyTable table;          // per-class counts of this dataset

  std::size_t size() const { return labels.size(); }

  void validate() const {
    if (images.rank() != 4 || images.dim(0) != labels.size())
      throw std::invalid_argument("LabeledDataset: image/label count mismatch");
    std::vector<int> seen(num_classes, 0);
    for (int y : labels) {
      if (y < 0 || y >= num_classes) throw std::invalid_argument("LabeledDataset: label out of range");
      ++seen[y];
    }
    if (seen != table.counts)
      throw std::invalid_argument("LabeledDataset: manifest counts disagree with labels");
  }

  void set_class_weights(const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != num_classes)
      throw std::invalid_argument("set_class_weights: size mismatch");
    sample_weights.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      sample_weights[i] = static_cast<float>(w[labels[i]]);
  }
};

/// One drawn minibatch.
struct Batch {
  Tensor images;               // (N, C, H, W)
  std::vector<int> labels;     // N
  std::vector<float> weights;  // N
  std::size_t size() const { return labels.size(); }
};

// ---------------------------------------------------------------------------
// Synthetic CIFAR-shaped source
// ---------------------------------------------------------------------------

/// Deterministic synthetic image source with CIFAR-10 geometry. Each class is
/// a band-limited prototype field; samples are torus-shifted copies of the
/// prototype plus shared confuser fields and pixel noise, so classes are
/// separable but not trivially so, and few-shot classes generalize poorly.
struct SyntheticSpec {
  std::uint64_t seed = 1234;
  int num_classes = 10;
  int per_class_train = 5000;
  int per_class_test = 1000;
  std::size_t channels = 3, height = 32, width = 32;
  double noise_sigma = 0.9;     // pixel noise, in prototype RMS units
  double confuser_scale = 0.7;  // amplitude of shared nuisance fields
  int num_confusers = 4;
  int shift_range = 5;  // max |dx|,|dy| of the class-pattern torus shift

  nlohmann::json to_json() const {
    return {{"seed", seed},
            {"num_classes", num_classes},
            {"per_class_train", per_class_train},
            {"per_class_test", per_class_test},
            {"channels", channels},
            {"height", height},
            {"width", width},
            {"noise_sigma", noise_sigma},
            {"confuser_scale", confuser_scale},
            {"num_confusers", num_confusers},
            {"shift_range", shift_range}};
  }
  static SyntheticSpec from_json(const nlohmann::json& j) {
    SyntheticSpec s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.num_classes = j.at("num_classes").get<int>();
    s.per_class_train = j.at("per_class_train").get<int>();
    s.per_class_test = j.at("per_class_test").get<int>();
    s.channels = j.at("channels").get<std::size_t>();
    s.height = j.at("height").get<std::size_t>();
    s.width = j.at("width").get<std::size_t>();
    s.noise_sigma = j.at("noise_sigma").get<double>();
    s.confuser_scale = j.at("confuser_scale").get<double>();
    s.num_confusers = j.at("num_confusers").get<int>();
    s.shift_range = j.at("shift_range").get<int>();
    return s;
  }

  std::uint64_t content_hash() const { return fnv1a(to_json().dump().data(), to_json().dump().size()); }
};

namespace detail {

// Band-limited field: sum of a few random plane waves per channel, unit RMS.
inline std::vector<float> make_field(std::size_t ch, std::size_t h, std::size_t w, Rng& rng) {
  std::vector<float> field(ch * h * w, 0.0f);
  std::uniform_int_distribution<int> freq(-3, 3);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> amp(0.5, 1.0);
  std::bernoulli_distribution flip(0.5);
  const int waves = 5;
  for (int j = 0; j < waves; ++j) {
    int fx = freq(rng), fy = freq(rng);
    if (fx == 0 && fy == 0) fx = 1;
    const double ph = phase(rng);
    for (std::size_t c = 0; c < ch; ++c) {
      const double a = amp(rng) * (flip(rng) ? 1.0 : -1.0);
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
          const double arg = 2.0 * M_PI * (fx * static_cast<double>(x) / w + fy * static_cast<double>(y) / h) + ph;
          field[(c * h + y) * w + x] += static_cast<float>(a * std::cos(arg));
        }
    }
  }
  double ss = 0.0;
  for (float v : field) ss += double(v) * v;
  const float inv_rms = static_cast<float>(1.0 / std::sqrt(ss / field.size() + 1e-12));
  for (float& v : field) v *= inv_rms;
  return field;
}

// Add `scale * roll(field, dy, dx)` into dst (torus shift).
inline void add_rolled(std::vector<float>& dst, const std::vector<float>& field, std::size_t ch,
                       std::size_t h, std::size_t w, int dy, int dx, float scale) {
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t y = 0; y < h; ++y) {
      const std::size_t sy = (y + h - (dy % int(h) + int(h)) % int(h)) % h;
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t sx = (x + w - (dx % int(w) + int(w)) % int(w)) % w;
        dst[(c * h + y) * w + x] += scale * field[(c * h + sy) * w + sx];
      }
    }
}

}  // namespace detail

enum class Split { kTrain, kTest };

/// Generates the balanced synthetic dataset for one split. Every sample is a
/// pure function of (spec.seed, split, class, index), so regeneration and
/// index-based subsetting are reproducible in any order.
inline LabeledDataset generate_synthetic_balanced(const SyntheticSpec& spec, Split split) {
  const std::size_t ch = spec.channels, h = spec.height, w = spec.width;
  const int per_class = split == Split::kTrain ? spec.per_class_train : spec.per_class_test;
  const std::uint64_t split_tag = split == Split::kTrain ? 0x7261494eull : 0x74657374ull;

  // Class prototypes and shared confusers from the structural stream.
  Rng structural(derive_seed(spec.seed, 0x5752340ull));
  std::vector<std::vector<float>> protos, confusers;
  for (int k = 0; k < spec.num_classes; ++k) protos.push_back(detail::make_field(ch, h, w, structural));
  for (int m = 0; m < spec.num_confusers; ++m) confusers.push_back(detail::make_field(ch, h, w, structural));

  LabeledDataset ds;
  ds.channels = ch;
  ds.height = h;
  ds.width = w;
  ds.num_classes = spec.num_classes;
  const std::size_t n = static_cast<std::size_t>(per_class) * spec.num_classes;
  ds.images = Tensor({n, ch, h, w});
  ds.labels.resize(n);
  ds.sample_weights.assign(n, 1.0f);

  std::vector<float> work(ch * h * w);
  std::size_t row = 0;
  for (int k = 0; k < spec.num_classes; ++k) {
    for (int idx = 0; idx < per_class; ++idx, ++row) {
      Rng rng(derive_seed(derive_seed(spec.seed, split_tag + 31ull * k), static_cast<std::uint64_t>(idx)));
      std::uniform_int_distribution<int> shift(-spec.shift_range, spec.shift_range);
      std::uniform_real_distribution<double> coeff(-1.0, 1.0);
      std::normal_distribution<double> noise(0.0, spec.noise_sigma);

      std::fill(work.begin(), work.end(), 0.0f);
      detail::add_rolled(work, protos[k], ch, h, w, shift(rng), shift(rng), 1.0f);
      for (const auto& g : confusers)
        detail::add_rolled(work, g, ch, h, w, shift(rng), shift(rng),
                           static_cast<float>(spec.confuser_scale * coeff(rng)));

      float* out = ds.images.data() + row * ch * h * w;
      for (std::size_t i = 0; i < work.size(); ++i) {
        const double v = 0.5 + 0.22 * (work[i] + noise(rng));
        out[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
      ds.labels[row] = k;
    }
  }
  ds.table = ClassFrequencyTable(std::vector<int>(spec.num_classes, per_class));
  return ds;
}

// ---------------------------------------------------------------------------
// CIFAR-10 binary source
// ---------------------------------------------------------------------------

namespace detail {

inline void read_cifar_bin(const std::string& path, LabeledDataset& ds, std::size_t& row) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open CIFAR file: " + path);
  constexpr std::size_t kRecord = 3073;
  std::vector<unsigned char> buf(kRecord);
  while (in.read(reinterpret_cast<char*>(buf.data()), kRecord)) {
    ds.labels[row] = buf[0];
    float* out = ds.images.data() + row * 3072;
    for (std::size_t i = 0; i < 3072; ++i) out[i] = buf[1 + i] / 255.0f;
    ++row;
  }
}

inline std::string cifar_dir(const std::string& root) {
  namespace fs = std::filesystem;
  if (fs::exists(fs::path(root) / "data_batch_1.bin")) return root;
  const auto nested = fs::path(root) / "cifar-10-batches-bin";
  if (fs::exists(nested / "data_batch_1.bin")) return nested.string();
  throw std::runtime_error("CIFAR-10 binaries not found under: " + root);
}

}  // namespace detail

/// Loads the standard CIFAR-10 binary batches (pre-downloaded; this toolkit
/// never fetches data).
inline LabeledDataset load_cifar10(const std::string& root, Split split) {
  const std::string dir = detail::cifar_dir(root);
  LabeledDataset ds;
  ds.num_classes = 10;
  const std::size_t n = split == Split::kTrain ? 50000 : 10000;
  ds.images = Tensor({n, 3, 32, 32});
  ds.labels.resize(n);
  ds.sample_weights.assign(n, 1.0f);
  std::size_t row = 0;
  if (split == Split::kTrain) {
    for (int b = 1; b <= 5; ++b) detail::read_cifar_bin(dir + "/data_batch_" + std::to_string(b) + ".bin", ds, row);
  } else {
    detail::read_cifar_bin(dir + "/test_batch.bin", ds, row);
  }
  if (row != n) throw std::runtime_error("CIFAR-10: unexpected record count");
  std::vector<int> counts(10, 0);
  for (int y : ds.labels) ++counts[y];
  ds.table = ClassFrequencyTable(counts);
  return ds;
}

// ---------------------------------------------------------------------------
// Long-tail subset construction
// ---------------------------------------------------------------------------

/// Uniform-without-replacement per-class subsample under spec.seed.
/// Returned samples are ordered by class, then by ascending source id, so the
/// result is byte-identical across rebuilds. retained_ids (optional) receives
/// the source indices in the same order.
inline LabeledDataset build_longtail_subset(const LabeledDataset& balanced, const ImbalanceSpec& spec,
                                            std::vector<int>* retained_ids = nullptr) {
  spec.validate();
  if (spec.num_classes != balanced.num_classes)
    throw std::invalid_argument("build_longtail_subset: class count mismatch");
  const auto counts = compute_class_counts(spec);

  std::vector<std::vector<int>> by_class(spec.num_classes);
  for (std::size_t i = 0; i < balanced.labels.size(); ++i)
    by_class[balanced.labels[i]].push_back(static_cast<int>(i));

  std::vector<int> chosen;
  for (int c = 0; c < spec.num_classes; ++c) {
    if (static_cast<int>(by_class[c].size()) < counts[c]) {
      std::ostringstream msg;
      msg << "build_longtail_subset: class " << c << " has " << by_class[c].size()
          << " source samples, needs " << counts[c];
      throw std::runtime_error(msg.str());
    }
    Rng rng(derive_seed(spec.seed, 0xDA7Aull + static_cast<std::uint64_t>(c)));
    auto ids = by_class[c];
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(counts[c]);
    std::sort(ids.begin(), ids.end());
    chosen.insert(chosen.end(), ids.begin(), ids.end());
  }
  if (retained_ids) *retained_ids = chosen;

  LabeledDataset out;
  out.channels = balanced.channels;
  out.height = balanced.height;
  out.width = balanced.width;
  out.num_classes = balanced.num_classes;
  const std::size_t px = balanced.channels * balanced.height * balanced.width;
  out.images = Tensor({chosen.size(), balanced.channels, balanced.height, balanced.width});
  out.labels.resize(chosen.size());
  out.sample_weights.assign(chosen.size(), 1.0f);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    std::copy_n(balanced.images.data() + static_cast<std::size_t>(chosen[i]) * px, px,
                out.images.data() + i * px);
    out.labels[i] = balanced.labels[chosen[i]];
  }
  out.table = ClassFrequencyTable(counts);
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Simple augmentation (fixed pre-transform: pad-4 random crop + h-flip)
// ---------------------------------------------------------------------------

inline void augment_crop_flip(Tensor& batch, int pad, Rng& rng) {
  const std::size_t n = batch.dim(0), ch = batch.dim(1), h = batch.dim(2), w = batch.dim(3);
  std::uniform_int_distribution<int> off(0, 2 * pad);
  std::bernoulli_distribution flip(0.5);
  std::vector<float> padded(ch * (h + 2 * pad) * (w + 2 * pad));
  const std::size_t pw = w + 2 * pad, ph = h + 2 * pad;
  for (std::size_t i = 0; i < n; ++i) {
    float* img = batch.data() + i * ch * h * w;
    std::fill(padded.begin(), padded.end(), 0.0f);
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t y = 0; y < h; ++y)
        std::copy_n(img + (c * h + y) * w, w, padded.data() + (c * ph + y + pad) * pw + pad);
    const int oy = off(rng), ox = off(rng);
    const bool do_flip = flip(rng);
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t y = 0; y < h; ++y) {
        const float* src = padded.data() + (c * ph + y + oy) * pw + ox;
        float* dst = img + (c * h + y) * w;
        if (do_flip)
          for (std::size_t x = 0; x < w; ++x) dst[x] = src[w - 1 - x];
        else
          std::copy_n(src, w, dst);
      }
  }
}

// ---------------------------------------------------------------------------
// Dataset directory (manifest + index)
// ---------------------------------------------------------------------------

struct DatasetManifest {
  ImbalanceSpec spec;
  std::vector<int> class_counts;
  std::string source_kind;  // "synthetic" | "cifar10"
  std::uint64_t source_hash = 0;
  nlohmann::json source_params;  // SyntheticSpec json, or {"root": ...}

  nlohmann::json to_json() const {
    return {{"format_version", 1},
            {"spec",
             {{"num_classes", spec.num_classes},
              {"max_count", spec.max_count},
              {"imbalance_factor", spec.imbalance_factor},
              {"decay_mu", spec.decay_mu()},
              {"seed", spec.seed}}},
            {"class_counts", class_counts},
            {"source", {{"kind", source_kind}, {"hash", source_hash}, {"params", source_params}}}};
  }

  static DatasetManifest from_json(const nlohmann::json& j) {
    DatasetManifest m;
    m.spec.num_classes = j.at("spec").at("num_classes").get<int>();
    m.spec.max_count = j.at("spec").at("max_count").get<int>();
    m.spec.imbalance_factor = j.at("spec").at("imbalance_factor").get<double>();
    m.spec.seed = j.at("spec").at("seed").get<std::uint64_t>();
    m.class_counts = j.at("class_counts").get<std::vector<int>>();
    m.source_kind = j.at("source").at("kind").get<std::string>();
    m.source_hash = j.at("source").at("hash").get<std::uint64_t>();
    m.source_params = j.at("source").at("params");
    return m;
  }
};

inline void save_dataset_dir(const std::string& dir, const DatasetManifest& manifest,
                             const std::vector<int>& retained_ids) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream mf(fs::path(dir) / "manifest.json");
  mf << manifest.to_json().dump(2) << "\n";
  std::ofstream ix(fs::path(dir) / "index.txt");
  for (int id : retained_ids) ix << id << "\n";
}

inline DatasetManifest load_manifest(const std::string& dir) {
  std::ifstream mf(std::filesystem::path(dir) / "manifest.json");
  if (!mf) throw std::runtime_error("missing manifest.json in " + dir);
  nlohmann::json j;
  mf >> j;
  return DatasetManifest::from_json(j);
}

inline std::vector<int> load_index(const std::string& dir) {
  std::ifstream ix(std::filesystem::path(dir) / "index.txt");
  if (!ix) throw std::runtime_error("missing index.txt in " + dir);
  std::vector<int> ids;
  int v;
  while (ix >> v) ids.push_back(v);
  return ids;
}

}  // namespace glmc
