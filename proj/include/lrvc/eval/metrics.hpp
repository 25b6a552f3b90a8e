// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "lrvc/audio/pitch.hpp"
#include "lrvc/eval/convert.hpp"

namespace lrvc {

/// Cosine between the speaker embeddings of two recordings.
inline double speaker_similarity(Converter& conv, const AudioSegment& converted, const AudioSegment& target) {
  return cosine(conv.speaker_embedding(converted), conv.speaker_embedding(target));
}

/// Mean per-frame Euclidean distance between the content frames of two
/// recordings of equal duration.
inline double content_distance(const ContentEncoder& encoder, const AudioSegment& source, const AudioSegment& converted) {
  const AudioSegment a = resample_to(source, 16000);
  const AudioSegment b = resample_to(converted, 16000);
  if (a.size() != b.size())
    throw ArgumentError("content_distance: durations differ (" + std::to_string(a.duration()) + " s vs " +
                        std::to_string(b.duration()) + " s)");
  const ContentFrames ca = encoder(a), cb = encoder(b);
  double total = 0;
  for (std::size_t t = 0; t < ca.size(); ++t) {
    double d = 0;
    for (std::size_t j = 0; j < ca.dims(); ++j) d += std::pow(static_cast<double>(ca.frames(t, j)) - cb.frames(t, j), 2);
    total += std::sqrt(d);
  }
  return total / static_cast<double>(ca.size());
}

/// True when the converted F0 exists and lies nearer the target's F0.
inline bool f0_transferred(std::optional<double> converted, double source_f0, double target_f0) {
  return converted && std::abs(*converted - target_f0) < std::abs(*converted - source_f0);
}

struct VarianceReport {
  double intra = 0;  // mean squared distance of an embedding to its speaker centroid
  double inter = 0;  // mean squared distance of speaker centroids to their mean
  double ratio = 0;  // intra / inter; 0 when both vanish
};

/// Embedding spread within and across speakers. Needs >= 2 speakers with
/// >= 2 embeddings each.
inline VarianceReport embedding_variance(const std::map<int, std::vector<Tensor<float>>>& by_speaker) {
  if (by_speaker.size() < 2) throw ArgumentError("embedding variance: need at least 2 speakers");
  std::vector<std::vector<double>> centroids;
  double intra = 0;
  std::size_t count = 0;
  for (const auto& [id, list] : by_speaker) {
    if (list.size() < 2)
      throw ArgumentError("embedding variance: speaker " + std::to_string(id) + " has fewer than 2 embeddings");
    std::vector<double> c(list.front().size(), 0.0);
    for (const auto& e : list)
      for (std::size_t j = 0; j < c.size(); ++j) c[j] += e[j];
    for (double& v : c) v /= static_cast<double>(list.size());
    for (const auto& e : list) {
      double d = 0;
      for (std::size_t j = 0; j < c.size(); ++j) d += (e[j] - c[j]) * (e[j] - c[j]);
      intra += d;
      ++count;
    }
    centroids.push_back(std::move(c));
  }
  std::vector<double> grand(centroids.front().size(), 0.0);
  for (const auto& c : centroids)
    for (std::size_t j = 0; j < c.size(); ++j) grand[j] += c[j] / static_cast<double>(centroids.size());
  double inter = 0;
  for (const auto& c : centroids)
    for (std::size_t j = 0; j < c.size(); ++j) inter += (c[j] - grand[j]) * (c[j] - grand[j]);
  VarianceReport r;
  r.intra = intra / static_cast<double>(count);
  r.inter = inter / static_cast<double>(centroids.size());
  if (r.inter > 0) r.ratio = r.intra / r.inter;
  else r.ratio = r.intra > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

}  // namespace lrvc
