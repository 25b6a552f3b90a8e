// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "lrvc/compute/tensor.hpp"

namespace lrvc {

struct StftConfig {
  int n_fft = 2048;
  int win_length = 1200;
  int hop = 300;
};

/// Complex spectrogram, [frames x (n_fft/2 + 1)] row-major.
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<std::complex<float>> data;

  std::complex<float>* row(std::size_t t) { return data.data() + t * bins; }
  const std::complex<float>* row(std::size_t t) const { return data.data() + t * bins; }
};

/// Short-time Fourier transform with frame t centred on sample t*hop + hop/2,
/// so a signal of N samples (N divisible by hop) yields exactly N/hop frames.
/// Samples outside the signal are zero.
class Stft {
 public:
  explicit Stft(StftConfig config) : config_(config), window_(static_cast<std::size_t>(config.win_length)) {
    if (config.n_fft < config.win_length || config.hop < 1 || config.win_length < 1)
      throw ArgumentError("stft: need n_fft >= win_length >= 1 and hop >= 1");
    for (int n = 0; n < config.win_length; ++n)
      window_[static_cast<std::size_t>(n)] =
          static_cast<float>(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / config.win_length));
    fft_.SetFlag(Eigen::FFT<float>::HalfSpectrum);
  }

  const StftConfig& config() const noexcept { return config_; }
  std::size_t bins() const noexcept { return static_cast<std::size_t>(config_.n_fft / 2 + 1); }
  std::size_t frames_for(std::size_t samples) const { return samples / static_cast<std::size_t>(config_.hop); }

  Spectrogram analyze(const std::vector<float>& x) {
    if (x.size() % static_cast<std::size_t>(config_.hop) != 0)
      throw ShapeError("stft: " + std::to_string(x.size()) + " samples not divisible by hop " +
                       std::to_string(config_.hop));
    Spectrogram spec{frames_for(x.size()), bins(), {}};
    spec.data.resize(spec.frames * spec.bins);
    std::vector<float> buffer(static_cast<std::size_t>(config_.n_fft));
    std::vector<std::complex<float>> out;
    for (std::size_t t = 0; t < spec.frames; ++t) {
      std::fill(buffer.begin(), buffer.end(), 0.0f);
      const long start = frame_start(t);
      for (int n = 0; n < config_.win_length; ++n) {
        const long i = start + n;
        if (i >= 0 && i < static_cast<long>(x.size()))
          buffer[static_cast<std::size_t>(n)] = x[static_cast<std::size_t>(i)] * window_[static_cast<std::size_t>(n)];
      }
      fft_.fwd(out, buffer);
      std::copy_n(out.begin(), spec.bins, spec.row(t));
    }
    return spec;
  }

  /// Windowed overlap-add inverse, normalized by the summed squared window.
  std::vector<float> synthesize(const Spectrogram& spec, std::size_t length) {
    std::vector<double> acc(length, 0.0), norm(length, 0.0);
    std::vector<std::complex<float>> half(spec.bins);
    std::vector<float> frame;
    for (std::size_t t = 0; t < spec.frames; ++t) {
      std::copy_n(spec.row(t), spec.bins, half.begin());
      fft_.inv(frame, half, config_.n_fft);
      const long start = frame_start(t);
      for (int n = 0; n < config_.win_length; ++n) {
        const long i = start + n;
        if (i < 0 || i >= static_cast<long>(length)) continue;
        const float w = window_[static_cast<std::size_t>(n)];
        acc[static_cast<std::size_t>(i)] += frame[static_cast<std::size_t>(n)] * w;
        norm[static_cast<std::size_t>(i)] += static_cast<double>(w) * w;
      }
    }
    std::vector<float> out(length);
    for (std::size_t i = 0; i < length; ++i) out[i] = norm[i] > 1e-8 ? static_cast<float>(acc[i] / norm[i]) : 0.0f;
    return out;
  }

 private:
  long frame_start(std::size_t t) const {
    return static_cast<long>(t) * config_.hop + config_.hop / 2 - config_.win_length / 2;
  }

  StftConfig config_;
  std::vector<float> window_;
  Eigen::FFT<float> fft_;
};

}  // namespace lrvc
