// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lrvc/audio/segment.hpp"
#include "lrvc/compute/init.hpp"
#include "lrvc/synth/script.hpp"
#include "lrvc/synth/speaker.hpp"

namespace lrvc::synth {

inline constexpr int kSynthRate = 48000;
inline constexpr double kNoiseFloor = 3e-4;

namespace detail {

// Derivative of a Rosenberg pulse: 40% opening, 16% closing phase.
inline double glottal_flow(double phase) {
  constexpr double tp = 0.40, tn = 0.16;
  if (phase < tp) return 0.5 * (1.0 - std::cos(std::numbers::pi * phase / tp));
  if (phase < tp + tn) return std::cos(0.5 * std::numbers::pi * (phase - tp) / tn);
  return 0.0;
}

/// Two-pole resonator with per-sample frequency (Klatt form, unity DC gain).
struct Resonator {
  double bandwidth;
  double y1 = 0, y2 = 0;

  double operator()(double x, double freq) {
    const double c = -std::exp(-2.0 * std::numbers::pi * bandwidth / kSynthRate);
    const double b = 2.0 * std::exp(-std::numbers::pi * bandwidth / kSynthRate) *
                     std::cos(2.0 * std::numbers::pi * freq / kSynthRate);
    const double y = (1.0 - b - c) * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace detail

/// Source-filter rendering of `script` in the voice of `profile`.
///
/// The glottal source follows a slow ±3% intonation contour around base_f0
/// with per-period jitter. Formant targets are scaled by formant_shift and
/// glide between tokens; silences gate the source off.
inline AudioSegment synthesize_utterance(const SpeakerProfile& profile, const UtteranceScript& script,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0x51));
  std::vector<std::size_t> ends;
  std::size_t total = 0;
  for (const auto& t : script.tokens) {
    total += static_cast<std::size_t>(std::lround(t.duration_ms * kSynthRate / 1000.0));
    ends.push_back(total);
  }

  const double contour_hz = uniform(rng, 0.3, 0.8);
  const double contour_phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double tilt = 0.1 + 0.06 * (-profile.spectral_tilt - 3.0);

  // Smoothing coefficients: ~20 ms formant glides, ~6 ms amplitude ramps.
  const double formant_glide = std::exp(-1.0 / (0.020 * kSynthRate));
  const double amp_glide = std::exp(-1.0 / (0.006 * kSynthRate));

  detail::Resonator r1{80}, r2{100}, r3{140};
  double f[3] = {500 * profile.formant_shift, 1500 * profile.formant_shift, 2500 * profile.formant_shift};
  double amp = 0, phase = 0, period = kSynthRate / profile.base_f0, prev_flow = 0, tilted = 0;
  for (const auto& t : script.tokens) {
    if (!t.silent()) {
      f[0] = t.f1 * profile.formant_shift, f[1] = t.f2 * profile.formant_shift, f[2] = t.f3 * profile.formant_shift;
      break;
    }
  }

  AudioSegment out{std::vector<float>(total), kSynthRate};
  std::size_t token = 0;
  for (std::size_t n = 0; n < total; ++n) {
    while (n >= ends[token]) ++token;
    const Token& tk = script.tokens[token];
    if (!tk.silent()) {
      const double target[3] = {tk.f1, tk.f2, tk.f3};
      for (int k = 0; k < 3; ++k) f[k] = formant_glide * f[k] + (1 - formant_glide) * target[k] * profile.formant_shift;
    }
    amp = amp_glide * amp + (1 - amp_glide) * (tk.silent() ? 0.0 : 1.0);

    phase += 1.0 / period;
    if (phase >= 1.0) {
      phase -= 1.0;
      const double time = static_cast<double>(n) / kSynthRate;
      const double f0 = profile.base_f0 * (1.0 + 0.03 * std::sin(2 * std::numbers::pi * contour_hz * time + contour_phase));
      period = kSynthRate / f0 * (1.0 + profile.f0_jitter * normal(rng));
    }
    const double flow = detail::glottal_flow(phase);
    const double source = (flow - prev_flow) * amp;
    prev_flow = flow;
    tilted = source + tilt * tilted;
    out.samples[n] = static_cast<float>(r3(r2(r1(tilted, f[0]), f[1]), f[2]));
  }
  normalize_peak(out, 0.9f);
  for (float& v : out.samples) v = std::clamp(static_cast<float>(v + kNoiseFloor * normal(rng)), -1.0f, 1.0f);
  return out;
}

}  // namespace lrvc::synth
