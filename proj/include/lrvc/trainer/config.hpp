// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lrvc/content/encoder.hpp"
#include "lrvc/losses/losses.hpp"
#include "lrvc/model/config.hpp"

namespace lrvc {

/// Everything a training run depends on. Loaded from a JSON object whose
/// keys mirror the field names; "model" and "content_encoder" are nested.
struct TrainConfig {
  LossMode mode = LossMode::SelfDiffBoth;
  std::size_t batch_size = 16;
  double learning_rate = 5e-4;
  std::uint64_t steps = 3000;
  double segment_seconds = 2.0;
  std::uint64_t seed = 0;
  LossWeights weights;
  std::filesystem::path corpus;
  std::uint64_t validation_interval = 200;
  /// Crop offsets are multiples of this many milliseconds; 0 draws them
  /// continuously (at 1/8000 s resolution) and disables the feature cache.
  double crop_grid_ms = 100.0;
  ModelConfig model;
  ContentEncoderConfig content;

  std::size_t segment_samples(int rate) const {
    return static_cast<std::size_t>(std::llround(segment_seconds * rate));
  }

  /// Checks the numeric preconditions and the length contract between the
  /// content frames, the resampling spec and the mel frames.
  void validate() const {
    if (batch_size < 1) throw ArgumentError("config: batch_size must be >= 1");
    if (steps < 1) throw ArgumentError("config: steps must be >= 1");
    if (!(learning_rate > 0)) throw ArgumentError("config: learning_rate must be > 0");
    if (validation_interval < 1) throw ArgumentError("config: validation_interval must be >= 1");
    if (weights.cycle < 0 || weights.speaker < 0) throw ArgumentError("config: lambda weights must be >= 0");
    if (crop_grid_ms < 0) throw ArgumentError("config: crop_grid_ms must be >= 0");
    if (crop_grid_ms > 0 && std::fmod(crop_grid_ms * 48.0, 6.0) != 0.0)
      throw ArgumentError("config: crop_grid_ms must be a multiple of 0.125 ms");
    model.validate();
    const std::size_t n16 = segment_samples(16000), n24 = segment_samples(24000);
    if (!(segment_seconds > 0) || n16 % kContentHop != 0 || n24 % 300 != 0 ||
        std::abs(segment_seconds * 16000 - static_cast<double>(n16)) > 1e-6)
      throw ArgumentError("config: segment_seconds=" + std::to_string(segment_seconds) +
                          " must be a multiple of 20 ms and 12.5 ms (e.g. 2.0)");
    const std::size_t frames = resample_length(n16 / kContentHop, model.spec);
    if (frames != n24 / 300)
      throw ArgumentError("config: spec p=" + std::to_string(model.spec.p) + " q=" + std::to_string(model.spec.q) +
                          " maps " + std::to_string(n16 / kContentHop) + " content frames to " +
                          std::to_string(frames) + " mel frames, but the segment has " + std::to_string(n24 / 300));
    if (model.content_dim != content.output_dim)
      throw ArgumentError("config: model.content_dim differs from content_encoder.output_dim");
  }
};

inline nlohmann::ordered_json content_config_json(const ContentEncoderConfig& c) {
  return nlohmann::ordered_json{{"hidden", c.hidden}, {"output_dim", c.output_dim}, {"seed", c.seed}};
}

inline void apply_content_config_json(const nlohmann::json& j, ContentEncoderConfig& c,
                                      const std::string& prefix = "content_encoder.") {
  if (!j.is_object()) throw ArgumentError("'" + prefix + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "hidden") c.hidden = v.get<std::size_t>();
      else if (k == "output_dim") c.output_dim = v.get<std::size_t>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else throw ArgumentError("unknown config key '" + prefix + k + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError("config key '" + prefix + k + "': " + e.what());
    }
  }
}

inline nlohmann::ordered_json train_config_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(c.mode);
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["steps"] = c.steps;
  j["segment_seconds"] = c.segment_seconds;
  j["seed"] = c.seed;
  j["lambda_cycle"] = c.weights.cycle;
  j["lambda_speaker"] = c.weights.speaker;
  j["corpus"] = c.corpus.string();
  j["validation_interval"] = c.validation_interval;
  j["crop_grid_ms"] = c.crop_grid_ms;
  j["model"] = model_config_json(c.model);
  j["content_encoder"] = content_config_json(c.content);
  return j;
}

/// Applies the keys of `j` over defaults. A relative corpus path is resolved
/// against `base_dir`.
inline TrainConfig parse_train_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw ArgumentError("config: top level must be an object");
  TrainConfig c;
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "mode") c.mode = parse_mode(v.get<std::string>());
      else if (k == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (k == "learning_rate") c.learning_rate = v.get<double>();
      else if (k == "steps") c.steps = v.get<std::uint64_t>();
      else if (k == "segment_seconds") c.segment_seconds = v.get<double>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "lambda_cycle") c.weights.cycle = v.get<double>();
      else if (k == "lambda_speaker") c.weights.speaker = v.get<double>();
      else if (k == "corpus") c.corpus = v.get<std::string>();
      else if (k == "validation_interval") c.validation_interval = v.get<std::uint64_t>();
      else if (k == "crop_grid_ms") c.crop_grid_ms = v.get<double>();
      else if (k == "model") apply_model_config_json(v, c.model);
      else if (k == "content_encoder") apply_content_config_json(v, c.content);
      else throw ArgumentError("unknown config key '" + k + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError("config key '" + k + "': " + e.what());
    }
  }
  if (!c.corpus.empty() && c.corpus.is_relative() && !base_dir.empty()) c.corpus = base_dir / c.corpus;
  return c;
}

inline TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_train_config(j, path.parent_path());
}

}  // namespace lrvc
