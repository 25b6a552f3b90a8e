// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "lrvc/model/config.hpp"
#include "lrvc/model/module.hpp"

namespace lrvc {

/// Broadcasts the speaker vector onto every content frame.
template <class T>
Var<T> fuse_speaker(Var<T> content, Var<T> s) {
  return ops::concat_broadcast(content, s);
}

/// Length-resampling decoder. Conv layers run over the fused input; layers
/// that carry an upsampling factor r emit r times the hidden width, which
/// pixel_shuffle_1d folds into time. A linear layer maps to mel bands and an
/// average pool of window p sets the final rate.
template <class T>
class Decoder {
 public:
  Decoder(const ModelConfig& c, ParameterStore<T>& store, std::mt19937_64& rng)
      : kernel_(c.decoder_kernel), spec_(c.spec), upsampling_(c.layer_upsampling()) {
    const auto k = static_cast<std::size_t>(c.decoder_kernel);
    std::size_t in = c.content_dim + c.speaker_dim;
    const double gain = residual_gain(c.decoder_layers);
    for (std::size_t l = 0; l < c.decoder_layers; ++l) {
      const auto r = static_cast<std::size_t>(upsampling_[l]);
      const bool residual = r == 1 && in == c.decoder_hidden;
      convs_.push_back(Affine<T>::conv(store, "decoder.conv" + std::to_string(l), k, in, c.decoder_hidden * r, rng,
                                       residual ? gain : 1.0));
      in = c.decoder_hidden;
    }
    output_ = Affine<T>::dense(store, "decoder.output", c.decoder_hidden, c.mel_dim, rng);
  }

  /// [T x d_c] content and [d_s] speaker vector -> [T q / p x mel_dim].
  Var<T> operator()(Tape<T>& tape, Var<T> content, Var<T> s) const {
    const std::size_t frames = content.shape().at(0);
    if ((frames * static_cast<std::size_t>(spec_.q)) % static_cast<std::size_t>(spec_.p) != 0)
      throw ShapeError("decode: T=" + std::to_string(frames) + " with p=" + std::to_string(spec_.p) +
                       " q=" + std::to_string(spec_.q) + " gives a fractional output length");
    Var<T> h = fuse_speaker(content, s);
    for (std::size_t l = 0; l < convs_.size(); ++l) {
      Var<T> y = ops::relu(convs_[l].conv1d(tape, h, kernel_));
      if (upsampling_[l] > 1) h = ops::pixel_shuffle_1d(y, upsampling_[l]);
      else h = convs_[l].in() == convs_[l].out() ? ops::add(h, y) : y;
    }
    return ops::avg_pool_1d(output_.linear(tape, h), spec_.p);
  }

  const ResampleSpec& spec() const noexcept { return spec_; }
  const std::vector<int>& upsampling() const noexcept { return upsampling_; }

 private:
  int kernel_;
  ResampleSpec spec_;
  std::vector<int> upsampling_;
  std::vector<Affine<T>> convs_;
  Affine<T> output_;
};

}  // namespace lrvc
