// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "lrvc/audio/mel.hpp"
#include "lrvc/compute/init.hpp"

namespace lrvc {

struct GriffinLimConfig {
  int iterations = 60;
  int nnls_iterations = 30;
  std::uint64_t seed = 0;
};

/// Non-negative least-squares inversion of the mel filterbank, started from
/// the clipped pseudo-inverse solution. Returns linear magnitudes
/// [frames x bins].
inline RowMatrix<float> mel_to_linear(const MelFrames& mel, const RowMatrix<float>& fb, int iterations) {
  const auto frames = static_cast<Eigen::Index>(mel.size());
  RowMatrix<float> energies(frames, fb.rows());
  for (Eigen::Index i = 0; i < energies.size(); ++i) energies.data()[i] = std::exp(mel.frames[static_cast<std::size_t>(i)]);

  const Eigen::MatrixXd fbd = fb.cast<double>();
  const Eigen::MatrixXd gram = fbd * fbd.transpose();
  const Eigen::MatrixXd pinv = fbd.transpose() * gram.ldlt().solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const float step = static_cast<float>(1.0 / lipschitz);

  RowMatrix<float> linear = (energies * pinv.transpose().cast<float>()).cwiseMax(0.0f);
  for (int it = 0; it < iterations; ++it) {
    const RowMatrix<float> residual = linear * fb.transpose() - energies;
    linear = (linear - step * (residual * fb)).cwiseMax(0.0f);
  }
  return linear;
}

/// Phase recovery from log-mel frames; output has frames*hop samples.
inline AudioSegment griffin_lim(const MelFrames& mel, const MelConfig& mc = {}, const GriffinLimConfig& gc = {}) {
  if (mel.bands() != static_cast<std::size_t>(mc.n_mels))
    throw ShapeError("griffin_lim: expected " + std::to_string(mc.n_mels) + " mel bands, got " +
                     std::to_string(mel.bands()));
  Stft stft(mc.stft);
  const RowMatrix<float> magnitude = mel_to_linear(mel, mel_filterbank(mc), gc.nnls_iterations);
  const std::size_t frames = mel.size(), bins = stft.bins();
  const std::size_t length = frames * static_cast<std::size_t>(mc.stft.hop);

  Spectrogram spec{frames, bins, std::vector<std::complex<float>>(frames * bins)};
  std::mt19937_64 rng(mix_seed(gc.seed, 0x6c));
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    const double phase = 2.0 * std::numbers::pi * uniform01(rng);
    spec.data[i] = std::polar(magnitude.data()[i], static_cast<float>(phase));
  }
  std::vector<float> audio = stft.synthesize(spec, length);
  for (int it = 0; it < gc.iterations; ++it) {
    const Spectrogram estimate = stft.analyze(audio);
    for (std::size_t i = 0; i < spec.data.size(); ++i) {
      const std::complex<float> z = estimate.data[i];
      const float mag = std::abs(z);
      spec.data[i] = mag > 0 ? magnitude.data()[i] * (z / mag) : std::complex<float>(magnitude.data()[i], 0.0f);
    }
    audio = stft.synthesize(spec, length);
  }
  for (float& v : audio) v = std::clamp(v, -1.0f, 1.0f);
  return {std::move(audio), mc.sample_rate};
}

}  // namespace lrvc
