// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lrvc/audio/mel.hpp"
#include "lrvc/audio/wav.hpp"
#include "lrvc/content/encoder.hpp"
#include "lrvc/synth/corpus.hpp"

namespace lrvc {

/// One utterance held at the two model rates. Both views derive from the
/// same 48 kHz master, so an offset of n master samples is n/3 samples at
/// 16 kHz and n/2 at 24 kHz.
struct DualRateUtterance {
  std::string id;
  AudioSegment a16, a24;

  std::size_t length48() const { return a16.size() * 3; }
};

inline DualRateUtterance load_dual_rate(const synth::Corpus& corpus, const synth::CorpusEntry& e) {
  DualRateUtterance u{e.id, load_wav(corpus.path(e.wav16)), load_wav(corpus.path(e.wav24))};
  require_rate(u.a16, 16000, e.wav16.c_str());
  require_rate(u.a24, 24000, e.wav24.c_str());
  if (u.a16.size() * 3 != u.a24.size() * 2)
    throw DataError("utterance '" + e.id + "': 16 kHz and 24 kHz views disagree in length");
  return u;
}

/// Crop of `segment48` master samples starting at `offset48`.
struct DualRateSegment {
  std::size_t offset48 = 0;
  AudioSegment a16, a24;
};

inline DualRateSegment crop(const DualRateUtterance& u, std::size_t offset48, std::size_t segment48) {
  if (offset48 % 6 != 0) throw ArgumentError("crop: offset must be a multiple of 6 master samples");
  if (offset48 + segment48 > u.length48())
    throw DataError("utterance '" + u.id + "' is shorter than the requested crop");
  return {offset48, u.a16.slice(offset48 / 3, segment48 / 3), u.a24.slice(offset48 / 2, segment48 / 2)};
}

struct PairOffsets {
  std::size_t u = 0, v = 0;  // master-rate (48 kHz) sample offsets
};

/// Two independent uniform crop offsets within an utterance of `length48`
/// master samples. Offsets are multiples of `quantum48` (6 keeps both model
/// rates sample-aligned; 4800 is the 100 ms grid).
inline PairOffsets sample_offsets(std::size_t length48, std::size_t segment48, std::mt19937_64& rng,
                                  std::size_t quantum48 = 6, const std::string& id = "") {
  if (quantum48 == 0 || quantum48 % 6 != 0) throw ArgumentError("sample_pair: quantum must be a positive multiple of 6");
  if (length48 < segment48)
    throw DataError("utterance '" + id + "' lasts " + std::to_string(static_cast<double>(length48) / 48000.0) +
                    " s, shorter than the " + std::to_string(static_cast<double>(segment48) / 48000.0) + " s crop");
  const std::size_t slots = (length48 - segment48) / quantum48 + 1;
  std::uniform_int_distribution<std::size_t> pick(0, slots - 1);
  PairOffsets o;
  o.u = pick(rng) * quantum48;
  o.v = pick(rng) * quantum48;
  return o;
}

/// Two same-utterance crops materialized at 16 and 24 kHz.
inline std::pair<DualRateSegment, DualRateSegment> sample_pair(const DualRateUtterance& u, std::uint64_t seed,
                                                               double segment_seconds = 2.0, std::size_t quantum48 = 6) {
  const auto segment48 = static_cast<std::size_t>(std::llround(segment_seconds * 48000));
  std::mt19937_64 rng(seed);
  const PairOffsets o = sample_offsets(u.length48(), segment48, rng, quantum48, u.id);
  return {crop(u, o.u, segment48), crop(u, o.v, segment48)};
}

/// Content frames and mel frames of every crop the trainer asks for,
/// memoized per (utterance, offset) when caching is on.
class FeatureBank {
 public:
  struct Features {
    Tensor<float> content;  // [T_inp x d_c]
    Tensor<float> mel;      // [T_out x 80]
  };

  FeatureBank(std::vector<DualRateUtterance> utterances, const ContentEncoder& encoder, std::size_t segment48,
              bool cache)
      : utterances_(std::move(utterances)), encoder_(encoder), segment48_(segment48), cache_(cache) {}

  std::size_t size() const noexcept { return utterances_.size(); }
  const DualRateUtterance& utterance(std::size_t i) const { return utterances_.at(i); }
  std::size_t segment48() const noexcept { return segment48_; }
  std::size_t cached() const noexcept { return memo_.size(); }

  const Features& get(std::size_t index, std::size_t offset48) {
    const auto key = std::make_pair(index, offset48);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const DualRateSegment seg = crop(utterances_.at(index), offset48, segment48_);
    Features f{encoder_(seg.a16).frames, mel_(seg.a24).frames};
    if (!cache_) memo_.clear();
    return memo_.emplace(key, std::move(f)).first->second;
  }

 private:
  std::vector<DualRateUtterance> utterances_;
  const ContentEncoder& encoder_;
  MelAnalyzer mel_;
  std::size_t segment48_;
  bool cache_;
  std::map<std::pair<std::size_t, std::size_t>, Features> memo_;
};

}  // namespace lrvc
