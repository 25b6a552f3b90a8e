// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lrvc/audio/rvf.hpp"
#include "lrvc/audio/segment.hpp"
#include "lrvc/compute/init.hpp"
#include "lrvc/compute/kernels.hpp"

namespace lrvc {

inline constexpr int kContentRate = 16000;
inline constexpr std::size_t kContentHop = 320;
inline constexpr std::size_t kContentDim = 256;

/// Frame-level content features at 50 frames per second.
struct ContentFrames {
  Tensor<float> frames;  // [T x d_c]
  double frame_rate = 50.0;

  std::size_t size() const { return frames.dim(0); }
  std::size_t dims() const { return frames.dim(1); }
};

struct ContentEncoderConfig {
  std::size_t hidden = 128;
  std::size_t output_dim = kContentDim;
  std::uint64_t seed = 0xc0ffee;
};

/// Frozen featurizer: seven strided 1-D convolutions over the waveform
/// (total stride 320) with fixed random weights, followed by per-utterance
/// channel standardization. It has no trainable parameters and is safe to
/// share between threads.
class ContentEncoder {
 public:
  static constexpr std::array<ConvGeometry, 7> kLayers{{
      {10, 5, 3}, {3, 2, 1}, {3, 2, 1}, {3, 2, 1}, {3, 2, 1}, {2, 2, 0}, {2, 2, 0}}};

  explicit ContentEncoder(ContentEncoderConfig config = {}) : config_(config) {
    if (config.hidden == 0 || config.output_dim == 0) throw ArgumentError("content encoder: zero width");
    std::mt19937_64 rng(mix_seed(config.seed, 0xc0));
    std::size_t in = 1;
    for (std::size_t l = 0; l < kLayers.size(); ++l) {
      const std::size_t out = l + 1 == kLayers.size() ? config.output_dim : config.hidden;
      const std::size_t fan_in = kLayers[l].kernel * in;
      // He-style uniform bound keeps activations O(1) through the ReLU stack.
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
      Tensor<float> w({static_cast<std::size_t>(kLayers[l].kernel), in, out});
      for (auto& v : w.values()) v = static_cast<float>(uniform(rng, -bound, bound));
      weights_.push_back(std::move(w));
      biases_.emplace_back(Shape{out});
      in = out;
    }
  }

  const ContentEncoderConfig& config() const noexcept { return config_; }
  const std::vector<Tensor<float>>& weights() const noexcept { return weights_; }

  ContentFrames operator()(const AudioSegment& segment) const {
    require_rate(segment, kContentRate, "encode_content");
    if (segment.size() == 0 || segment.size() % kContentHop != 0)
      throw ArgumentError("encode_content: length " + std::to_string(segment.size()) +
                          " is not a positive multiple of 320 samples");
    Tensor<float> x({segment.size(), 1}, segment.samples);
    for (std::size_t l = 0; l < kLayers.size(); ++l) {
      x = kernels::conv1d(x, weights_[l], biases_[l], kLayers[l]);
      if (l == 0) {
        for (auto& v : x.values()) v = std::abs(v);
      } else if (l + 1 < kLayers.size()) {
        for (auto& v : x.values()) v = v > 0 ? v : 0.0f;
      }
    }
    standardize(x);
    return {std::move(x), 50.0};
  }

 private:
  static void standardize(Tensor<float>& x) {
    const std::size_t n = x.dim(0), c = x.dim(1);
    for (std::size_t j = 0; j < c; ++j) {
      double mean = 0, var = 0;
      for (std::size_t t = 0; t < n; ++t) mean += x(t, j);
      mean /= static_cast<double>(n);
      for (std::size_t t = 0; t < n; ++t) var += (x(t, j) - mean) * (x(t, j) - mean);
      const double sd = std::sqrt(var / static_cast<double>(n));
      const double inv = sd > 1e-8 ? 1.0 / sd : 0.0;
      for (std::size_t t = 0; t < n; ++t) x(t, j) = static_cast<float>((x(t, j) - mean) * inv);
    }
  }

  ContentEncoderConfig config_;
  std::vector<Tensor<float>> weights_;
  std::vector<Tensor<float>> biases_;
};

inline ContentFrames encode_content(const AudioSegment& segment, const ContentEncoder& encoder = ContentEncoder{}) {
  return encoder(segment);
}

/// Loads precomputed content features (RVF1, 256 dims per frame).
inline ContentFrames load_content_features(const std::filesystem::path& path, std::size_t dims = kContentDim) {
  ContentFrames out{load_rvf(path, dims), 50.0};
  if (!out.frames.all_finite()) throw FormatError(path.string() + ": non-finite content features");
  return out;
}

inline void save_content_features(const ContentFrames& c, const std::filesystem::path& path) { save_rvf(c.frames, path); }

}  // namespace lrvc
