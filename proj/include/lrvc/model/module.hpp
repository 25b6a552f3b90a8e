// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <deque>
#include <random>
#include <string>

#include "lrvc/compute/init.hpp"
#include "lrvc/compute/ops.hpp"

namespace lrvc {

/// Owns named parameters at stable addresses.
template <class T>
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

  Parameter<T>& add(std::string name, Tensor<T> init) { return params_.emplace_back(std::move(name), std::move(init)); }

  ParameterList<T> parameters() {
    ParameterList<T> out;
    for (auto& p : params_) out.push_back(&p);
    return out;
  }
  std::size_t size() const noexcept { return params_.size(); }

 private:
  std::deque<Parameter<T>> params_;
};

/// Initial scale of the residual branches in a stack of `depth` layers.
inline double residual_gain(std::size_t depth) { return depth > 1 ? 1.0 / std::sqrt(static_cast<double>(depth)) : 1.0; }

/// Weight and bias of one conv or linear layer.
template <class T>
struct Affine {
  Parameter<T>* weight = nullptr;
  Parameter<T>* bias = nullptr;

  /// `gain` scales the initial draw; residual branches use gain < 1 so deep
  /// stacks start near the identity.
  static Affine conv(ParameterStore<T>& store, const std::string& name, std::size_t kernel, std::size_t in,
                     std::size_t out, std::mt19937_64& rng, double gain = 1.0) {
    return {&store.add(name + ".weight", scaled(fan_in_uniform<T>({kernel, in, out}, kernel * in, rng), gain)),
            &store.add(name + ".bias", scaled(fan_in_uniform<T>({out}, kernel * in, rng), gain))};
  }
  static Affine dense(ParameterStore<T>& store, const std::string& name, std::size_t in, std::size_t out,
                      std::mt19937_64& rng, double gain = 1.0) {
    return {&store.add(name + ".weight", scaled(fan_in_uniform<T>({in, out}, in, rng), gain)),
            &store.add(name + ".bias", scaled(fan_in_uniform<T>({out}, in, rng), gain))};
  }

  static Tensor<T> scaled(Tensor<T> t, double gain) {
    if (gain != 1.0)
      for (auto& v : t.values()) v = static_cast<T>(v * gain);
    return t;
  }

  std::size_t in() const { return weight->value.rank() == 3 ? weight->value.dim(1) : weight->value.dim(0); }
  std::size_t out() const { return weight->value.shape().back(); }

  Var<T> conv1d(Tape<T>& tape, Var<T> x, int kernel) const {
    return ops::conv1d(x, tape.param(*weight), tape.param(*bias), ConvGeometry{kernel, 1, kernel / 2});
  }
  Var<T> linear(Tape<T>& tape, Var<T> x) const { return ops::linear(x, tape.param(*weight), tape.param(*bias)); }
};

}  // namespace lrvc
