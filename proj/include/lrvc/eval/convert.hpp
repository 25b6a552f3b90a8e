// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "lrvc/audio/griffin_lim.hpp"
#include "lrvc/audio/mel.hpp"
#include "lrvc/audio/resample.hpp"
#include "lrvc/content/encoder.hpp"
#include "lrvc/model/model.hpp"
#include "lrvc/trainer/checkpoint.hpp"
#include "lrvc/trainer/config.hpp"

namespace lrvc {

/// Conversion lengths are padded to this many 24 kHz samples (100 ms), the
/// shortest duration that is a whole number of content and mel frames.
inline constexpr std::size_t kConversionQuantum24 = 2400;

struct ConversionResult {
  std::string source_id, target_id;
  MelFrames mel;       // decoder output, 24 kHz frames
  AudioSegment audio;  // Griffin-Lim rendering at 24 kHz
};

inline double cosine(const Tensor<float>& a, const Tensor<float>& b) {
  require_same_shape(a.shape(), b.shape(), "cosine");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

/// Frozen inference pipeline built from a checkpoint.
class Converter {
 public:
  explicit Converter(const Checkpoint& ckpt, GriffinLimConfig vocoder = {})
      : model_(ckpt.model), encoder_(content_config(ckpt)), vocoder_(vocoder) {
    restore_model(ckpt, model_);
  }

  static Converter from_file(const std::filesystem::path& path, GriffinLimConfig vocoder = {}) {
    return Converter(load_checkpoint(path), vocoder);
  }

  const Model<float>& model() const noexcept { return model_; }
  const ContentEncoder& content_encoder() const noexcept { return encoder_; }

  /// Log-mel frames of `audio` at 24 kHz, trimmed to whole frames.
  MelFrames mel(const AudioSegment& audio) {
    AudioSegment a = resample_to(audio, 24000);
    const std::size_t n = a.size() / 300 * 300;
    if (n == 0) throw ArgumentError("audio shorter than one 12.5 ms mel frame");
    a.samples.resize(n);
    return analyzer_(a);
  }

  Tensor<float> speaker_embedding(const AudioSegment& audio) { return model_.encode_speaker(mel(audio).frames); }
  Tensor<float> speaker_embedding(const MelFrames& mel) const { return model_.encode_speaker(mel.frames); }

  ContentFrames content(const AudioSegment& audio) const { return encoder_(resample_to(audio, 16000)); }

  /// Decodes the content of `source` with the speaker of `target`. The
  /// source is zero-padded to a 100 ms multiple and the rendered audio is
  /// cut back to the source duration.
  ConversionResult convert(const AudioSegment& source, const AudioSegment& target, bool render = true) {
    return convert_with_embedding(source, speaker_embedding(target), render);
  }

  ConversionResult convert_with_embedding(const AudioSegment& source, const Tensor<float>& s, bool render = true) {
    AudioSegment src24 = resample_to(source, 24000);
    const std::size_t n24 = src24.size();
    if (n24 == 0) throw ArgumentError("convert: empty source");
    const std::size_t padded = (n24 + kConversionQuantum24 - 1) / kConversionQuantum24 * kConversionQuantum24;
    AudioSegment src16 = resample_to(source, 16000);
    src16.samples.resize(padded / 3 * 2, 0.0f);
    const ContentFrames c = encoder_(src16);
    ConversionResult r;
    r.mel.frames = model_.decode(c.frames, s);
    if (render) {
      r.audio = griffin_lim(r.mel, analyzer_.config(), vocoder_);
      r.audio.samples.resize(n24);
    }
    return r;
  }

 private:
  static ContentEncoderConfig content_config(const Checkpoint& ckpt) {
    ContentEncoderConfig c;
    if (ckpt.metadata.contains("content_encoder")) apply_content_config_json(ckpt.metadata["content_encoder"], c);
    return c;
  }

  Model<float> model_;
  ContentEncoder encoder_;
  MelAnalyzer analyzer_;
  GriffinLimConfig vocoder_;
};

}  // namespace lrvc
