// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "lrvc/audio/resample.hpp"

namespace lrvc {

struct PitchConfig {
  int analysis_rate = 16000;
  double frame_seconds = 0.04;
  double hop_seconds = 0.01;
  double min_f0 = 60.0;
  double max_f0 = 400.0;
  /// Minimum normalized cross-correlation peak for a voiced frame.
  double voicing_threshold = 0.5;
  /// Frames this far below the loudest frame are treated as unvoiced.
  double silence_db = -40.0;
  /// A candidate lag within this fraction of the best peak wins if shorter.
  double octave_ratio = 0.85;
  double min_voiced_fraction = 0.1;
};

/// Per-frame F0 in Hz (nullopt for unvoiced frames) from the normalized
/// cross-correlation function.
inline std::vector<std::optional<double>> pitch_track(const AudioSegment& segment, const PitchConfig& c = {}) {
  const AudioSegment x = resample_to(segment, c.analysis_rate);
  const auto& s = x.samples;
  const auto frame = static_cast<std::size_t>(c.frame_seconds * c.analysis_rate);
  const auto hop = static_cast<std::size_t>(c.hop_seconds * c.analysis_rate);
  const auto min_lag = static_cast<std::size_t>(std::floor(c.analysis_rate / c.max_f0));
  const auto max_lag = static_cast<std::size_t>(std::ceil(c.analysis_rate / c.min_f0));
  std::vector<std::optional<double>> track;
  if (s.size() < frame + max_lag + 1) return track;

  const std::size_t n_frames = (s.size() - frame - max_lag - 1) / hop + 1;
  std::vector<double> energy(n_frames, 0.0);
  for (std::size_t f = 0; f < n_frames; ++f)
    for (std::size_t n = 0; n < frame; ++n) energy[f] += static_cast<double>(s[f * hop + n]) * s[f * hop + n];
  const double loudest = *std::max_element(energy.begin(), energy.end());
  const double gate = loudest * std::pow(10.0, c.silence_db / 10.0);

  std::vector<double> buf(frame + max_lag + 1), r(max_lag + 2, 0.0);
  for (std::size_t f = 0; f < n_frames; ++f) {
    if (!(energy[f] > gate) || loudest <= 0) {
      track.emplace_back();
      continue;
    }
    double mean = 0;
    for (std::size_t n = 0; n < buf.size(); ++n) mean += (buf[n] = s[f * hop + n]);
    mean /= static_cast<double>(buf.size());
    for (double& v : buf) v -= mean;
    double e0 = 0;
    for (std::size_t n = 0; n < frame; ++n) e0 += buf[n] * buf[n];
    double e_lag = 0;
    for (std::size_t n = min_lag - 1; n < min_lag - 1 + frame; ++n) e_lag += buf[n] * buf[n];
    for (std::size_t lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      double cross = 0;
      for (std::size_t n = 0; n < frame; ++n) cross += buf[n] * buf[n + lag];
      r[lag - (min_lag - 1)] = cross / std::sqrt(std::max(e0 * e_lag, 1e-30));
      if (lag + frame < buf.size()) e_lag += buf[lag + frame] * buf[lag + frame] - buf[lag] * buf[lag];
    }
    auto at = [&](std::size_t lag) { return r[lag - (min_lag - 1)]; };
    double best = -1;
    for (std::size_t lag = min_lag; lag <= max_lag; ++lag)
      if (at(lag) >= at(lag - 1) && at(lag) >= at(lag + 1)) best = std::max(best, at(lag));
    if (best < c.voicing_threshold) {
      track.emplace_back();
      continue;
    }
    std::size_t chosen = 0;
    for (std::size_t lag = min_lag; lag <= max_lag; ++lag)
      if (at(lag) >= at(lag - 1) && at(lag) >= at(lag + 1) && at(lag) >= c.octave_ratio * best) {
        chosen = lag;
        break;
      }
    const double a = at(chosen - 1), b = at(chosen), d = at(chosen + 1);
    const double curvature = a - 2 * b + d;
    const double shift = curvature < 0 ? 0.5 * (a - d) / curvature : 0.0;
    track.emplace_back(c.analysis_rate / (static_cast<double>(chosen) + shift));
  }
  return track;
}

/// Median F0 over voiced frames; nullopt when fewer than the configured
/// fraction of frames are voiced.
inline std::optional<double> estimate_f0(const AudioSegment& segment, const PitchConfig& c = {}) {
  const auto track = pitch_track(segment, c);
  std::vector<double> voiced;
  for (const auto& f : track)
    if (f) voiced.push_back(*f);
  if (track.empty() || static_cast<double>(voiced.size()) < c.min_voiced_fraction * static_cast<double>(track.size()))
    return std::nullopt;
  const auto mid = voiced.begin() + static_cast<long>(voiced.size() / 2);
  std::nth_element(voiced.begin(), mid, voiced.end());
  if (voiced.size() % 2) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(voiced.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace lrvc
