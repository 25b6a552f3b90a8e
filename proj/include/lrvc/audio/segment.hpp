// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lrvc/core/errors.hpp"

namespace lrvc {

/// Mono sample buffer in [-1, 1] at 16, 24 or 48 kHz.
struct AudioSegment {
  std::vector<float> samples;
  int sample_rate = 0;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept { return sample_rate ? static_cast<double>(samples.size()) / sample_rate : 0.0; }

  /// Samples [offset, offset + length); throws DataError when out of range.
  AudioSegment slice(std::size_t offset, std::size_t length) const {
    if (offset + length > samples.size())
      throw DataError("slice [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                      ") exceeds segment of " + std::to_string(samples.size()) + " samples");
    return {std::vector<float>(samples.begin() + static_cast<long>(offset),
                               samples.begin() + static_cast<long>(offset + length)),
            sample_rate};
  }
};

inline bool is_supported_rate(int rate) { return rate == 16000 || rate == 24000 || rate == 48000; }

inline void require_rate(const AudioSegment& s, int rate, const char* what) {
  if (s.sample_rate != rate)
    throw ArgumentError(std::string(what) + ": expected " + std::to_string(rate) + " Hz audio, got " +
                        std::to_string(s.sample_rate) + " Hz");
}

inline double rms(const std::vector<float>& x) {
  if (x.empty()) return 0.0;
  double acc = 0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

/// Scales so that the peak magnitude equals `peak` (no-op on silence).
inline void normalize_peak(AudioSegment& s, float peak = 0.9f) {
  float mx = 0;
  for (float v : s.samples) mx = std::max(mx, std::abs(v));
  if (mx <= 0) return;
  const float g = peak / mx;
  for (float& v : s.samples) v *= g;
}

/// Crops or zero-pads to exactly `length` samples, keeping the start.
inline AudioSegment fit_length(const AudioSegment& s, std::size_t length) {
  AudioSegment out{s.samples, s.sample_rate};
  out.samples.resize(length, 0.0f);
  return out;
}

}  // namespace lrvc
