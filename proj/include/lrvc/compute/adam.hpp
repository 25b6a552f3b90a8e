// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lrvc/compute/tape.hpp"

namespace lrvc {

struct AdamConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adaptive-moment optimizer with a constant learning rate. Gradients are
/// read, never cleared; the caller zeroes them between steps.
template <class T>
class Adam {
 public:
  Adam(ParameterList<T> params, AdamConfig config) : params_(std::move(params)), config_(config) {
    if (!(config_.learning_rate > 0)) throw ArgumentError("Adam: learning rate must be > 0");
    for (auto* p : params_) {
      first_.emplace_back(p->value.shape());
      second_.emplace_back(p->value.shape());
    }
  }

  /// Applies one update. A non-finite gradient aborts the step before any
  /// parameter is touched.
  void step() {
    for (const auto* p : params_)
      if (!p->grad.all_finite()) throw TrainingError("non-finite gradient in parameter '" + p->name + "'");
    ++steps_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    const T b1 = static_cast<T>(config_.beta1), b2 = static_cast<T>(config_.beta2);
    const T lr = static_cast<T>(config_.learning_rate / c1);
    const T inv_c2 = static_cast<T>(1.0 / c2);
    const T eps = static_cast<T>(config_.epsilon);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto& value = params_[k]->value.values();
      const auto& grad = params_[k]->grad.values();
      auto& m = first_[k].values();
      auto& v = second_[k].values();
      for (std::size_t i = 0; i < value.size(); ++i) {
        const T g = grad[i];
        m[i] = b1 * m[i] + (T(1) - b1) * g;
        v[i] = b2 * v[i] + (T(1) - b2) * g * g;
        value[i] -= lr * m[i] / (std::sqrt(v[i] * inv_c2) + eps);
      }
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  const AdamConfig& config() const noexcept { return config_; }
  std::uint64_t steps() const noexcept { return steps_; }
  const ParameterList<T>& parameters() const noexcept { return params_; }
  std::vector<Tensor<T>>& first_moments() noexcept { return first_; }
  std::vector<Tensor<T>>& second_moments() noexcept { return second_; }
  const std::vector<Tensor<T>>& first_moments() const noexcept { return first_; }
  const std::vector<Tensor<T>>& second_moments() const noexcept { return second_; }
  void set_steps(std::uint64_t steps) noexcept { steps_ = steps; }

 private:
  ParameterList<T> params_;
  AdamConfig config_;
  std::vector<Tensor<T>> first_;
  std::vector<Tensor<T>> second_;
  std::uint64_t steps_ = 0;
};

}  // namespace lrvc
