// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrvc/core/errors.hpp"

namespace lrvc {

/// Decoder length ratio: output frames = input frames * q / p.
struct ResampleSpec {
  int p = 5;  // average-pool window
  int q = 8;  // sub-pixel upsampling factor

  void validate() const {
    if (p < 1 || q < 1)
      throw ArgumentError("resample spec: p and q must be >= 1, got p=" + std::to_string(p) + " q=" + std::to_string(q));
    if (std::gcd(p, q) != 1)
      throw ArgumentError("resample spec: p=" + std::to_string(p) + " and q=" + std::to_string(q) + " are not coprime");
  }
  friend bool operator==(const ResampleSpec&, const ResampleSpec&) = default;
};

inline std::size_t resample_length(std::size_t d_inp, const ResampleSpec& spec) {
  spec.validate();
  const std::size_t up = d_inp * static_cast<std::size_t>(spec.q);
  if (d_inp == 0 || up % static_cast<std::size_t>(spec.p) != 0)
    throw ShapeError("resample_length: d_inp=" + std::to_string(d_inp) + " times q=" + std::to_string(spec.q) +
                     " is not divisible by p=" + std::to_string(spec.p));
  return up / static_cast<std::size_t>(spec.p);
}

/// Splits q into x2 stages followed by at most one odd stage.
inline std::vector<int> shuffle_stages(int q) {
  std::vector<int> stages;
  while (q % 2 == 0) {
    stages.push_back(2);
    q /= 2;
  }
  if (q > 1) stages.push_back(q);
  return stages;
}

/// Architecture hyper-parameters shared by the speaker encoder, projection
/// head and decoder. Everything here enters the checkpoint config hash.
struct ModelConfig {
  std::size_t content_dim = 256;
  std::size_t mel_dim = 80;
  std::size_t speaker_dim = 128;
  std::size_t num_speakers = 6;

  std::size_t speaker_hidden = 128;
  std::size_t speaker_conv_layers = 12;
  std::size_t speaker_fc_layers = 12;
  int speaker_kernel = 5;

  std::size_t decoder_hidden = 128;
  std::size_t decoder_layers = 12;
  int decoder_kernel = 5;
  ResampleSpec spec;
  /// 1-based decoder layer after which each shuffle stage sits. Empty means
  /// evenly spread, ending at the last layer.
  std::vector<std::size_t> shuffle_after;

  std::uint64_t init_seed = 0;

  void validate() const {
    spec.validate();
    auto positive = [](std::size_t v, const char* name) {
      if (v == 0) throw ArgumentError(std::string("model config: ") + name + " must be >= 1");
    };
    positive(content_dim, "content_dim");
    positive(mel_dim, "mel_dim");
    positive(speaker_dim, "speaker_dim");
    positive(speaker_hidden, "speaker_hidden");
    positive(speaker_conv_layers, "speaker_conv_layers");
    positive(speaker_fc_layers, "speaker_fc_layers");
    positive(decoder_hidden, "decoder_hidden");
    positive(decoder_layers, "decoder_layers");
    if (num_speakers < 2) throw ArgumentError("model config: num_speakers must be >= 2");
    if (speaker_kernel < 1 || speaker_kernel % 2 == 0 || decoder_kernel < 1 || decoder_kernel % 2 == 0)
      throw ArgumentError("model config: kernel sizes must be odd");
    const auto stages = shuffle_stages(spec.q);
    if (!shuffle_after.empty()) {
      if (shuffle_after.size() != stages.size())
        throw ArgumentError("model config: shuffle_after lists " + std::to_string(shuffle_after.size()) +
                            " positions but q=" + std::to_string(spec.q) + " needs " + std::to_string(stages.size()));
      for (std::size_t i = 0; i < shuffle_after.size(); ++i)
        if (shuffle_after[i] < 1 || shuffle_after[i] > decoder_layers || (i && shuffle_after[i] < shuffle_after[i - 1]))
          throw ArgumentError("model config: shuffle_after must be non-decreasing within 1.." +
                              std::to_string(decoder_layers));
    }
  }

  /// Upsampling factor applied after each decoder layer (1 = none).
  std::vector<int> layer_upsampling() const {
    const auto stages = shuffle_stages(spec.q);
    std::vector<int> factor(decoder_layers, 1);
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const std::size_t after = shuffle_after.empty()
                                    ? (decoder_layers * (i + 1) + stages.size() - 1) / stages.size()
                                    : shuffle_after[i];
      factor[after - 1] *= stages[i];
    }
    return factor;
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline void to_json(nlohmann::json& j, const ResampleSpec& s) { j = nlohmann::json{{"p", s.p}, {"q", s.q}}; }

inline void from_json(const nlohmann::json& j, ResampleSpec& s) {
  for (const auto& [k, v] : j.items()) {
    if (k == "p") s.p = v.get<int>();
    else if (k == "q") s.q = v.get<int>();
    else throw ArgumentError("unknown key 'spec." + k + "'");
  }
}

inline nlohmann::ordered_json model_config_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["content_dim"] = c.content_dim;
  j["mel_dim"] = c.mel_dim;
  j["speaker_dim"] = c.speaker_dim;
  j["num_speakers"] = c.num_speakers;
  j["speaker_hidden"] = c.speaker_hidden;
  j["speaker_conv_layers"] = c.speaker_conv_layers;
  j["speaker_fc_layers"] = c.speaker_fc_layers;
  j["speaker_kernel"] = c.speaker_kernel;
  j["decoder_hidden"] = c.decoder_hidden;
  j["decoder_layers"] = c.decoder_layers;
  j["decoder_kernel"] = c.decoder_kernel;
  j["spec"] = {{"p", c.spec.p}, {"q", c.spec.q}};
  j["shuffle_after"] = c.shuffle_after;
  j["init_seed"] = c.init_seed;
  return j;
}

/// Reads keys present in `j` over `c`; unknown keys are an error naming the key.
inline void apply_model_config_json(const nlohmann::json& j, ModelConfig& c, const std::string& prefix = "model.") {
  if (!j.is_object()) throw ArgumentError("'" + prefix + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "content_dim") c.content_dim = v.get<std::size_t>();
      else if (k == "mel_dim") c.mel_dim = v.get<std::size_t>();
      else if (k == "speaker_dim") c.speaker_dim = v.get<std::size_t>();
      else if (k == "num_speakers") c.num_speakers = v.get<std::size_t>();
      else if (k == "speaker_hidden") c.speaker_hidden = v.get<std::size_t>();
      else if (k == "speaker_conv_layers") c.speaker_conv_layers = v.get<std::size_t>();
      else if (k == "speaker_fc_layers") c.speaker_fc_layers = v.get<std::size_t>();
      else if (k == "speaker_kernel") c.speaker_kernel = v.get<int>();
      else if (k == "decoder_hidden") c.decoder_hidden = v.get<std::size_t>();
      else if (k == "decoder_layers") c.decoder_layers = v.get<std::size_t>();
      else if (k == "decoder_kernel") c.decoder_kernel = v.get<int>();
      else if (k == "spec") c.spec = v.get<ResampleSpec>();
      else if (k == "shuffle_after") c.shuffle_after = v.get<std::vector<std::size_t>>();
      else if (k == "init_seed") c.init_seed = v.get<std::uint64_t>();
      else throw ArgumentError("unknown config key '" + prefix + k + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError("config key '" + prefix + k + "': " + e.what());
    }
  }
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t config_hash(const ModelConfig& c) { return fnv1a(model_config_json(c).dump()); }

}  // namespace lrvc
