// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "lrvc/model/config.hpp"
#include "lrvc/model/module.hpp"

namespace lrvc {

/// Speaker encoder: a conv stack over mel frames, mean over time, then a
/// stack of fully connected layers. Every conv layer is residual; the first
/// one changes width and takes a per-frame linear projection as its shortcut,
/// so the encoder cannot fall into a constant output when that layer's ReLUs
/// all go dark.
template <class T>
class SpeakerEncoder {
 public:
  SpeakerEncoder(const ModelConfig& c, ParameterStore<T>& store, std::mt19937_64& rng)
      : kernel_(c.speaker_kernel), dim_(c.speaker_dim) {
    const auto k = static_cast<std::size_t>(c.speaker_kernel);
    const double conv_gain = residual_gain(c.speaker_conv_layers);
    for (std::size_t l = 0; l < c.speaker_conv_layers; ++l) {
      const std::size_t in = l ? c.speaker_hidden : c.mel_dim;
      convs_.push_back(Affine<T>::conv(store, "speaker.conv" + std::to_string(l), k, in, c.speaker_hidden, rng,
                                       in == c.speaker_hidden ? conv_gain : 1.0));
      if (in != c.speaker_hidden)
        shortcuts_.emplace(l, Affine<T>::dense(store, "speaker.shortcut" + std::to_string(l), in, c.speaker_hidden, rng));
    }
    const double fc_gain = residual_gain(c.speaker_fc_layers);
    for (std::size_t l = 0; l < c.speaker_fc_layers; ++l) {
      const std::size_t out = l + 1 == c.speaker_fc_layers ? c.speaker_dim : c.speaker_hidden;
      fcs_.push_back(Affine<T>::dense(store, "speaker.fc" + std::to_string(l), c.speaker_hidden, out, rng,
                                      out == c.speaker_hidden ? fc_gain : 1.0));
    }
  }

  /// [T x mel_dim] -> [speaker_dim], any T >= 1.
  Var<T> operator()(Tape<T>& tape, Var<T> mel) const {
    ++calls_;
    Var<T> h = mel;
    for (std::size_t l = 0; l < convs_.size(); ++l) {
      Var<T> y = ops::relu(convs_[l].conv1d(tape, h, kernel_));
      const auto shortcut = shortcuts_.find(l);
      h = ops::add(shortcut == shortcuts_.end() ? h : shortcut->second.linear(tape, h), y);
    }
    Var<T> v = ops::mean_frames(h);
    for (std::size_t l = 0; l < fcs_.size(); ++l) {
      Var<T> y = fcs_[l].linear(tape, v);
      if (l + 1 < fcs_.size()) y = ops::relu(y);
      v = fcs_[l].in() == fcs_[l].out() ? ops::add(v, y) : y;
    }
    return v;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t calls() const noexcept { return calls_; }
  void reset_calls() const noexcept { calls_ = 0; }

 private:
  int kernel_;
  std::size_t dim_;
  std::vector<Affine<T>> convs_;
  std::map<std::size_t, Affine<T>> shortcuts_;
  std::vector<Affine<T>> fcs_;
  mutable std::size_t calls_ = 0;
};

/// Affine projection from speaker embeddings to K speaker logits.
template <class T>
class ProjectionHead {
 public:
  ProjectionHead(const ModelConfig& c, ParameterStore<T>& store, std::mt19937_64& rng)
      : layer_(Affine<T>::dense(store, "projection", c.speaker_dim, c.num_speakers, rng)) {}

  Var<T> operator()(Tape<T>& tape, Var<T> s) const {
    ++calls_;
    return layer_.linear(tape, s);
  }

  std::size_t num_classes() const { return layer_.out(); }
  const Affine<T>& layer() const noexcept { return layer_; }
  std::size_t calls() const noexcept { return calls_; }
  void reset_calls() const noexcept { calls_ = 0; }

 private:
  Affine<T> layer_;
  mutable std::size_t calls_ = 0;
};

}  // namespace lrvc
