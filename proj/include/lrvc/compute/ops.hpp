// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable operations. Each op computes its output with the kernels in
// kernels.hpp and records a closure that accumulates input gradients.

#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "lrvc/compute/kernels.hpp"
#include "lrvc/compute/tape.hpp"

namespace lrvc::ops {

namespace detail {
template <class T>
bool any_grad(Tape<T>& tape, std::initializer_list<Var<T>> vars) {
  for (const auto& v : vars)
    if (tape.requires_grad(v)) return true;
  return false;
}

template <class T>
Tape<T>& same_tape(Var<T> a, Var<T> b) {
  if (a.tape != b.tape) throw ArgumentError("operands recorded on different tapes");
  return *a.tape;
}
}  // namespace detail

template <class T>
Var<T> conv1d(Var<T> input, Var<T> weight, Var<T> bias, ConvGeometry g) {
  Tape<T>& tape = detail::same_tape(input, weight);
  kernels::check_conv1d(input.value(), weight.value(), bias.value(), g);
  auto cols = std::make_shared<Tensor<T>>(kernels::im2col(input.value(), g));
  Tensor<T> out = kernels::conv1d_from_cols(*cols, weight.value(), bias.value());
  const std::size_t xi = input.id, wi = weight.id, bi = bias.id;
  return tape.record(std::move(out), detail::any_grad(tape, {input, weight, bias}),
                     [cols, g, xi, wi, bi](Tape<T>& t, std::size_t self) {
                       Tensor<T>* dx = t.requires_grad(xi) ? &t.grad(xi) : nullptr;
                       Tensor<T>* dw = t.requires_grad(wi) ? &t.grad(wi) : nullptr;
                       Tensor<T>* db = t.requires_grad(bi) ? &t.grad(bi) : nullptr;
                       kernels::conv1d_backward(*cols, t.value(wi), t.grad(self), g, dx, dw, db);
                     });
}

template <class T>
Var<T> linear(Var<T> input, Var<T> weight, Var<T> bias) {
  Tape<T>& tape = detail::same_tape(input, weight);
  Tensor<T> out = kernels::linear(input.value(), weight.value(), bias.value());
  const std::size_t xi = input.id, wi = weight.id, bi = bias.id;
  return tape.record(std::move(out), detail::any_grad(tape, {input, weight, bias}),
                     [xi, wi, bi](Tape<T>& t, std::size_t self) {
                       Tensor<T>* dx = t.requires_grad(xi) ? &t.grad(xi) : nullptr;
                       Tensor<T>* dw = t.requires_grad(wi) ? &t.grad(wi) : nullptr;
                       Tensor<T>* db = t.requires_grad(bi) ? &t.grad(bi) : nullptr;
                       kernels::linear_backward(t.value(xi), t.value(wi), t.grad(self), dx, dw, db);
                     });
}

template <class T>
Var<T> pixel_shuffle_1d(Var<T> input, int r) {
  Tape<T>& tape = *input.tape;
  Tensor<T> out = kernels::pixel_shuffle_1d(input.value(), r);
  const std::size_t xi = input.id;
  return tape.record(std::move(out), tape.requires_grad(input), [xi](Tape<T>& t, std::size_t self) {
    auto& dx = t.grad(xi).values();
    const auto& dy = t.grad(self).values();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
  });
}

template <class T>
Var<T> avg_pool_1d(Var<T> input, int window) {
  Tape<T>& tape = *input.tape;
  Tensor<T> out = kernels::avg_pool_1d(input.value(), window);
  const std::size_t xi = input.id;
  return tape.record(std::move(out), tape.requires_grad(input), [xi, window](Tape<T>& t, std::size_t self) {
    kernels::avg_pool_1d_backward(t.grad(self), window, t.grad(xi));
  });
}

template <class T>
Var<T> relu(Var<T> input) {
  Tape<T>& tape = *input.tape;
  Tensor<T> out = input.value();
  for (auto& v : out.values()) v = v > T(0) ? v : T(0);
  const std::size_t xi = input.id;
  return tape.record(std::move(out), tape.requires_grad(input), [xi](Tape<T>& t, std::size_t self) {
    const auto& y = t.value(self).values();
    const auto& dy = t.grad(self).values();
    auto& dx = t.grad(xi).values();
    for (std::size_t i = 0; i < dx.size(); ++i)
      if (y[i] > T(0)) dx[i] += dy[i];
  });
}

template <class T>
Var<T> add(Var<T> a, Var<T> b) {
  Tape<T>& tape = detail::same_tape(a, b);
  require_same_shape(a.shape(), b.shape(), "add");
  Tensor<T> out = a.value();
  const auto& bv = b.value().values();
  for (std::size_t i = 0; i < bv.size(); ++i) out[i] += bv[i];
  const std::size_t ai = a.id, bi = b.id;
  return tape.record(std::move(out), detail::any_grad(tape, {a, b}), [ai, bi](Tape<T>& t, std::size_t self) {
    for (std::size_t id : {ai, bi}) {
      if (!t.requires_grad(id)) continue;
      auto& dx = t.grad(id).values();
      const auto& dy = t.grad(self).values();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    }
  });
}

template <class T>
Var<T> scale(Var<T> a, T factor) {
  Tape<T>& tape = *a.tape;
  Tensor<T> out = a.value();
  for (auto& v : out.values()) v *= factor;
  const std::size_t ai = a.id;
  return tape.record(std::move(out), tape.requires_grad(a), [ai, factor](Tape<T>& t, std::size_t self) {
    auto& dx = t.grad(ai).values();
    const auto& dy = t.grad(self).values();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += factor * dy[i];
  });
}

/// Temporal mean: [T x C] -> [C].
template <class T>
Var<T> mean_frames(Var<T> input) {
  Tape<T>& tape = *input.tape;
  const Tensor<T>& x = input.value();
  if (x.rank() != 2 || x.dim(0) == 0) throw ShapeError("mean_frames: need [frames x channels] with >= 1 frame");
  const std::size_t frames = x.dim(0), channels = x.dim(1);
  Tensor<T> out({channels});
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t c = 0; c < channels; ++c) out[c] += x(t, c);
  for (auto& v : out.values()) v /= static_cast<T>(frames);
  const std::size_t xi = input.id;
  return tape.record(std::move(out), tape.requires_grad(input), [xi, frames, channels](Tape<T>& t, std::size_t self) {
    const auto& dy = t.grad(self);
    auto& dx = t.grad(xi);
    const T inv = T(1) / static_cast<T>(frames);
    for (std::size_t f = 0; f < frames; ++f)
      for (std::size_t c = 0; c < channels; ++c) dx[f * channels + c] += dy[c] * inv;
  });
}

/// Appends `vec` to every frame: [T x A] , [B] -> [T x (A + B)].
template <class T>
Var<T> concat_broadcast(Var<T> frames, Var<T> vec) {
  Tape<T>& tape = detail::same_tape(frames, vec);
  const Tensor<T>& f = frames.value();
  const Tensor<T>& v = vec.value();
  if (f.rank() != 2 || v.rank() != 1)
    throw ShapeError("concat_broadcast: need [frames x channels] and [dims], got " + shape_str(f.shape()) + " and " +
                     shape_str(v.shape()));
  const std::size_t n = f.dim(0), a = f.dim(1), b = v.dim(0);
  Tensor<T> out({n, a + b});
  for (std::size_t t = 0; t < n; ++t) {
    std::copy_n(f.data() + t * a, a, out.data() + t * (a + b));
    std::copy_n(v.data(), b, out.data() + t * (a + b) + a);
  }
  const std::size_t fi = frames.id, vi = vec.id;
  return tape.record(std::move(out), detail::any_grad(tape, {frames, vec}),
                     [fi, vi, n, a, b](Tape<T>& t, std::size_t self) {
                       const auto& dy = t.grad(self);
                       if (t.requires_grad(fi)) {
                         auto& df = t.grad(fi);
                         for (std::size_t r = 0; r < n; ++r)
                           for (std::size_t c = 0; c < a; ++c) df[r * a + c] += dy[r * (a + b) + c];
                       }
                       if (t.requires_grad(vi)) {
                         auto& dv = t.grad(vi);
                         for (std::size_t r = 0; r < n; ++r)
                           for (std::size_t c = 0; c < b; ++c) dv[c] += dy[r * (a + b) + a + c];
                       }
                     });
}

/// Euclidean norm of a - b. The subgradient at a == b is taken as zero.
template <class T>
Var<T> l2_distance(Var<T> a, Var<T> b) {
  Tape<T>& tape = detail::same_tape(a, b);
  const T dist = kernels::l2_distance(a.value(), b.value());
  const std::size_t ai = a.id, bi = b.id;
  return tape.record(Tensor<T>::scalar(dist), detail::any_grad(tape, {a, b}),
                     [ai, bi](Tape<T>& t, std::size_t self) {
                       const T d = t.value(self)[0];
                       if (d == T(0)) return;
                       const T g = t.grad(self)[0] / d;
                       const auto& av = t.value(ai).values();
                       const auto& bv = t.value(bi).values();
                       if (t.requires_grad(ai)) {
                         auto& da = t.grad(ai).values();
                         for (std::size_t i = 0; i < da.size(); ++i) da[i] += g * (av[i] - bv[i]);
                       }
                       if (t.requires_grad(bi)) {
                         auto& db = t.grad(bi).values();
                         for (std::size_t i = 0; i < db.size(); ++i) db[i] -= g * (av[i] - bv[i]);
                       }
                     });
}

/// -log softmax(logits)[target]; gradient softmax(logits) - one_hot(target).
template <class T>
Var<T> softmax_cross_entropy(Var<T> logits, std::size_t target) {
  Tape<T>& tape = *logits.tape;
  const T loss = kernels::softmax_cross_entropy(logits.value(), target);
  const std::size_t li = logits.id;
  return tape.record(Tensor<T>::scalar(loss), tape.requires_grad(logits), [li, target](Tape<T>& t, std::size_t self) {
    Tensor<T> p = kernels::softmax(t.value(li));
    const T g = t.grad(self)[0];
    auto& dl = t.grad(li);
    for (std::size_t i = 0; i < p.size(); ++i) dl[i] += g * (p[i] - (i == target ? T(1) : T(0)));
  });
}

/// Sum of scalar nodes.
template <class T>
Var<T> sum(const std::vector<Var<T>>& terms) {
  if (terms.empty()) throw ArgumentError("sum: no terms");
  Tape<T>& tape = *terms.front().tape;
  T total = 0;
  bool needs = false;
  std::vector<std::size_t> ids;
  for (const auto& v : terms) {
    if (v.value().size() != 1) throw ShapeError("sum: expected scalar terms, got " + shape_str(v.shape()));
    total += v.value()[0];
    needs = needs || tape.requires_grad(v);
    ids.push_back(v.id);
  }
  return tape.record(Tensor<T>::scalar(total), needs, [ids](Tape<T>& t, std::size_t self) {
    const T g = t.grad(self)[0];
    for (std::size_t id : ids)
      if (t.requires_grad(id)) t.grad(id)[0] += g;
  });
}

}  // namespace lrvc::ops
