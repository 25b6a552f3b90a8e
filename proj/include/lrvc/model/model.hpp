// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>

#include "lrvc/model/config.hpp"
#include "lrvc/model/decoder.hpp"
#include "lrvc/model/module.hpp"
#include "lrvc/model/speaker.hpp"

namespace lrvc {

/// Trainable part of the converter: speaker encoder, projection head and
/// decoder, initialized deterministically from config.init_seed.
template <class T>
class Model {
 public:
  explicit Model(const ModelConfig& config)
      : config_((config.validate(), config)),
        rng_(mix_seed(config.init_seed, 0x3d)),
        speaker_(config_, store_, rng_),
        head_(config_, store_, rng_),
        decoder_(config_, store_, rng_) {}

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const noexcept { return config_; }
  const SpeakerEncoder<T>& speaker() const noexcept { return speaker_; }
  const ProjectionHead<T>& head() const noexcept { return head_; }
  const Decoder<T>& decoder() const noexcept { return decoder_; }
  ParameterList<T> parameters() { return store_.parameters(); }

  Var<T> encode_speaker(Tape<T>& tape, Var<T> mel) const { return speaker_(tape, mel); }
  Var<T> project(Tape<T>& tape, Var<T> s) const { return head_(tape, s); }
  Var<T> decode(Tape<T>& tape, Var<T> content, Var<T> s) const { return decoder_(tape, content, s); }

  /// Inference helpers on plain tensors.
  Tensor<T> encode_speaker(const Tensor<T>& mel) const {
    Tape<T> tape(false);
    return encode_speaker(tape, tape.constant(mel)).value();
  }
  Tensor<T> decode(const Tensor<T>& content, const Tensor<T>& s) const {
    Tape<T> tape(false);
    return decode(tape, tape.constant(content), tape.constant(s)).value();
  }
  Tensor<T> project(const Tensor<T>& s) const {
    Tape<T> tape(false);
    return project(tape, tape.constant(s)).value();
  }

  void reset_call_counters() const {
    speaker_.reset_calls();
    head_.reset_calls();
  }

  /// Copies parameter values from a model of another scalar type.
  template <class U>
  void assign_from(Model<U>& other) {
    auto dst = parameters();
    auto src = other.parameters();
    if (dst.size() != src.size()) throw IncompatibleError("assign_from: parameter count mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) {
      require_same_shape(dst[i]->value.shape(), src[i]->value.shape(), "assign_from");
      dst[i]->value = src[i]->value.template cast<T>();
    }
  }

 private:
  ModelConfig config_;
  std::mt19937_64 rng_;
  ParameterStore<T> store_;
  SpeakerEncoder<T> speaker_;
  ProjectionHead<T> head_;
  Decoder<T> decoder_;
};

}  // namespace lrvc
