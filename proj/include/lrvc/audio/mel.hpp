// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrvc/audio/segment.hpp"
#include "lrvc/audio/stft.hpp"
#include "lrvc/compute/kernels.hpp"

namespace lrvc {

struct MelConfig {
  int sample_rate = 24000;
  StftConfig stft{2048, 1200, 300};
  int n_mels = 80;
  double fmin = 80.0;
  double fmax = 7600.0;
  double log_floor = 1e-10;
};

/// Log-mel energies, [frames x n_mels].
struct MelFrames {
  Tensor<float> frames;
  int hop = 300;
  int sample_rate = 24000;

  std::size_t size() const noexcept { return frames.empty() ? 0 : frames.dim(0); }
  std::size_t bands() const noexcept { return frames.empty() ? 0 : frames.dim(1); }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filterbank on the HTK mel scale with unit peak response,
/// [n_mels x (n_fft/2 + 1)].
inline RowMatrix<float> mel_filterbank(const MelConfig& c) {
  const std::size_t bins = static_cast<std::size_t>(c.stft.n_fft / 2 + 1);
  RowMatrix<float> fb = RowMatrix<float>::Zero(c.n_mels, static_cast<Eigen::Index>(bins));
  const double lo = hz_to_mel(c.fmin), hi = hz_to_mel(c.fmax);
  std::vector<double> edges(static_cast<std::size_t>(c.n_mels + 2));
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(c.n_mels + 1));
  for (int m = 0; m < c.n_mels; ++m) {
    const double left = edges[static_cast<std::size_t>(m)], centre = edges[static_cast<std::size_t>(m + 1)],
                 right = edges[static_cast<std::size_t>(m + 2)];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * c.sample_rate / c.stft.n_fft;
      double w = 0;
      if (f > left && f <= centre) w = (f - left) / (centre - left);
      else if (f > centre && f < right) w = (right - f) / (right - centre);
      fb(m, static_cast<Eigen::Index>(k)) = static_cast<float>(w);
    }
  }
  return fb;
}

/// Centre frequency (Hz) of each mel band.
inline std::vector<double> mel_band_centres(const MelConfig& c) {
  const double lo = hz_to_mel(c.fmin), hi = hz_to_mel(c.fmax);
  std::vector<double> centres(static_cast<std::size_t>(c.n_mels));
  for (int m = 0; m < c.n_mels; ++m)
    centres[static_cast<std::size_t>(m)] = mel_to_hz(lo + (hi - lo) * (m + 1) / static_cast<double>(c.n_mels + 1));
  return centres;
}

/// Magnitude spectrogram -> log-mel analysis at 24 kHz, hop 300.
class MelAnalyzer {
 public:
  explicit MelAnalyzer(MelConfig config = {}) : config_(config), stft_(config.stft), fb_(mel_filterbank(config)) {}

  const MelConfig& config() const noexcept { return config_; }
  const RowMatrix<float>& filterbank() const noexcept { return fb_; }

  MelFrames operator()(const AudioSegment& segment) {
    require_rate(segment, config_.sample_rate, "mel_spectrogram");
    return from_spectrogram(stft_.analyze(segment.samples));
  }

  MelFrames from_spectrogram(const Spectrogram& spec) const {
    RowMatrix<float> mag(static_cast<Eigen::Index>(spec.frames), static_cast<Eigen::Index>(spec.bins));
    for (std::size_t t = 0; t < spec.frames; ++t)
      for (std::size_t k = 0; k < spec.bins; ++k) mag(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = std::abs(spec.row(t)[k]);
    MelFrames out;
    out.hop = config_.stft.hop;
    out.sample_rate = config_.sample_rate;
    out.frames = Tensor<float>({spec.frames, static_cast<std::size_t>(config_.n_mels)});
    auto mel = as_matrix(out.frames, spec.frames, static_cast<std::size_t>(config_.n_mels));
    mel.noalias() = mag * fb_.transpose();
    const float floor = static_cast<float>(config_.log_floor);
    for (auto& v : out.frames.values()) v = std::log(std::max(v, floor));
    return out;
  }

 private:
  MelConfig config_;
  Stft stft_;
  RowMatrix<float> fb_;
};

inline MelFrames mel_spectrogram(const AudioSegment& segment, const MelConfig& config = {}) {
  MelAnalyzer analyzer(config);
  return analyzer(segment);
}

}  // namespace lrvc
