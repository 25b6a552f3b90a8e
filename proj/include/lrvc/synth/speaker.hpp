// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lrvc/compute/init.hpp"
#include "lrvc/core/errors.hpp"

namespace lrvc::synth {

/// Voice parameters of one synthetic speaker.
struct SpeakerProfile {
  int speaker_id = 0;
  double base_f0 = 120.0;        // Hz, in [80, 300]
  double f0_jitter = 0.01;       // relative period perturbation (std)
  double formant_shift = 1.0;    // in [0.8, 1.25]
  double spectral_tilt = -6.0;   // dB/octave, in [-12, -3]

  friend bool operator==(const SpeakerProfile&, const SpeakerProfile&) = default;
};

inline constexpr double kMinF0 = 80.0;
inline constexpr double kMaxF0 = 300.0;
inline constexpr double kMinF0Separation = 15.0;

/// Deterministic profile from a seed.
inline SpeakerProfile generate_speaker(std::uint64_t seed, int speaker_id = 0) {
  std::mt19937_64 rng(mix_seed(seed, 0x5e));
  SpeakerProfile p;
  p.speaker_id = speaker_id;
  p.base_f0 = uniform(rng, kMinF0, kMaxF0);
  p.f0_jitter = uniform(rng, 0.003, 0.012);
  p.formant_shift = std::exp(uniform(rng, std::log(0.8), std::log(1.25)));
  p.spectral_tilt = uniform(rng, -12.0, -3.0);
  return p;
}

/// Draws `count` profiles whose base F0 values are pairwise at least 15 Hz
/// apart, resampling a candidate whenever it collides with an earlier one.
inline std::vector<SpeakerProfile> generate_speakers(int count, std::uint64_t seed) {
  if (count < 1) throw ArgumentError("generate_speakers: count must be >= 1");
  std::vector<SpeakerProfile> out;
  for (int k = 0; k < count; ++k) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt > 10000)
        throw ArgumentError("generate_speakers: cannot place " + std::to_string(count) +
                            " speakers 15 Hz apart in [80, 300] Hz");
      SpeakerProfile p = generate_speaker(mix_seed(seed, static_cast<std::uint64_t>(k) * 100003 + attempt), k);
      bool clash = false;
      for (const auto& q : out) clash = clash || std::abs(q.base_f0 - p.base_f0) < kMinF0Separation;
      if (!clash) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

}  // namespace lrvc::synth
