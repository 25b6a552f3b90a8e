// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lrvc/compute/tensor.hpp"

namespace lrvc {

/// Trainable tensor with its accumulated gradient.
template <class T>
struct Parameter {
  Parameter(std::string param_name, Tensor<T> initial)
      : name(std::move(param_name)), value(std::move(initial)), grad(value.shape()) {}

  void zero_grad() { grad.fill(T(0)); }

  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

template <class T>
using ParameterList = std::vector<Parameter<T>*>;

template <class T>
class Tape;

/// Handle to a node recorded on a Tape.
template <class T>
struct Var {
  Tape<T>* tape = nullptr;
  std::size_t id = 0;

  const Tensor<T>& value() const { return tape->value(*this); }
  const Shape& shape() const { return value().shape(); }
};

/// Reverse-mode recording of one forward pass. Nodes live until clear();
/// backward() walks them in reverse creation order.
template <class T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  /// With `track_params` false, parameters enter as constants and no
  /// backward closures are kept (inference).
  explicit Tape(bool track_params = true) : track_params_(track_params) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Value that never receives a gradient.
  Var<T> constant(Tensor<T> value) { return push(std::move(value), nullptr, false, nullptr, nullptr); }

  /// Leaf whose gradient is kept on the tape (read it with grad()).
  Var<T> input(Tensor<T> value) { return push(std::move(value), nullptr, true, nullptr, nullptr); }

  /// Leaf bound to a parameter; backward() adds into param.grad.
  Var<T> param(Parameter<T>& p) {
    return push(Tensor<T>{}, &p.value, track_params_, nullptr, track_params_ ? &p : nullptr);
  }
  bool tracks_params() const noexcept { return track_params_; }

  /// Records an op output. `fn` is skipped when no input requires a gradient.
  Var<T> record(Tensor<T> value, bool requires_grad, BackwardFn fn) {
    return push(std::move(value), nullptr, requires_grad, requires_grad ? std::move(fn) : nullptr, nullptr);
  }

  const Tensor<T>& value(Var<T> v) const { return node(v.id).get(); }
  bool requires_grad(Var<T> v) const { return nodes_.at(v.id).requires_grad; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }

  /// Gradient buffer of a node, allocated as zeros on first access.
  Tensor<T>& grad(std::size_t id) {
    Node& n = nodes_.at(id);
    if (n.grad.shape() != n.get().shape()) n.grad = Tensor<T>(n.get().shape());
    return n.grad;
  }
  Tensor<T>& grad(Var<T> v) { return grad(v.id); }
  const Tensor<T>& value(std::size_t id) const { return nodes_.at(id).get(); }

  /// Back-propagates d(root)/d(*) scaled by `seed`. Root must hold one value.
  void backward(Var<T> root, T seed = T(1)) {
    if (value(root).size() != 1) throw ShapeError("backward: root must be scalar, got " + shape_str(root.shape()));
    if (!nodes_.at(root.id).requires_grad) return;
    grad(root.id)[0] += seed;
    for (std::size_t i = root.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.requires_grad || n.grad.empty()) continue;
      if (n.backward) n.backward(*this, i);
      if (n.param) {
        auto& dst = n.param->grad.values();
        const auto& src = n.grad.values();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
      }
    }
  }

  void clear() { nodes_.clear(); }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> own;
    const Tensor<T>* ref = nullptr;
    Tensor<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter<T>* param = nullptr;

    const Tensor<T>& get() const { return ref ? *ref : own; }
  };

  const Node& node(std::size_t id) const { return nodes_.at(id); }

  Var<T> push(Tensor<T> value, const Tensor<T>* ref, bool requires_grad, BackwardFn fn, Parameter<T>* p) {
    nodes_.push_back(Node{std::move(value), ref, Tensor<T>{}, requires_grad, std::move(fn), p});
    return Var<T>{this, nodes_.size() - 1};
  }

  std::deque<Node> nodes_;
  bool track_params_ = true;
};

}  // namespace lrvc
