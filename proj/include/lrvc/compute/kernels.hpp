// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Value-level forward and backward kernels. These are pure functions on
// tensors; the differentiable wrappers in ops.hpp record them on a tape.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "lrvc/compute/tensor.hpp"

namespace lrvc {

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <class T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

template <class T>
MatrixMap<T> as_matrix(Tensor<T>& t, std::size_t rows, std::size_t cols) {
  return MatrixMap<T>(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}
template <class T>
ConstMatrixMap<T> as_matrix(const Tensor<T>& t, std::size_t rows, std::size_t cols) {
  return ConstMatrixMap<T>(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

/// Geometry of a 1-D convolution over the frame axis.
struct ConvGeometry {
  int kernel = 1;
  int stride = 1;
  int padding = 0;

  /// Output frame count for `frames` input frames. Throws ShapeError when the
  /// padded input is shorter than the kernel.
  std::size_t output_frames(std::size_t frames) const {
    if (kernel < 1 || stride < 1 || padding < 0)
      throw ArgumentError("conv1d: kernel=" + std::to_string(kernel) + " stride=" + std::to_string(stride) +
                          " padding=" + std::to_string(padding) + " out of range");
    const long padded = static_cast<long>(frames) + 2L * padding;
    if (padded < kernel)
      throw ShapeError("conv1d: input of " + std::to_string(frames) + " frames with padding " +
                       std::to_string(padding) + " is shorter than kernel " + std::to_string(kernel));
    return static_cast<std::size_t>((padded - kernel) / stride + 1);
  }
};

namespace kernels {

/// Checks conv1d operand shapes: input [T x Cin], weight [kernel x Cin x Cout], bias [Cout].
template <class T>
void check_conv1d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias, const ConvGeometry& g) {
  if (input.rank() != 2) throw ShapeError("conv1d: input must be [frames x channels], got " + shape_str(input.shape()));
  if (weight.rank() != 3 || weight.dim(0) != static_cast<std::size_t>(g.kernel) || weight.dim(1) != input.dim(1))
    throw ShapeError("conv1d: weight " + shape_str(weight.shape()) + " incompatible with input " +
                     shape_str(input.shape()) + " and kernel " + std::to_string(g.kernel));
  if (bias.rank() != 1 || bias.dim(0) != weight.dim(2))
    throw ShapeError("conv1d: bias " + shape_str(bias.shape()) + " does not match " + std::to_string(weight.dim(2)) +
                     " output channels");
}

/// Unfolds the input into [T' x kernel*Cin] patches (im2col).
template <class T>
Tensor<T> im2col(const Tensor<T>& input, const ConvGeometry& g) {
  const std::size_t frames = input.dim(0), channels = input.dim(1);
  const std::size_t out_frames = g.output_frames(frames);
  Tensor<T> cols({out_frames, static_cast<std::size_t>(g.kernel) * channels});
  for (std::size_t t = 0; t < out_frames; ++t) {
    T* dst = cols.data() + t * cols.cols();
    const long start = static_cast<long>(t) * g.stride - g.padding;
    for (int j = 0; j < g.kernel; ++j) {
      const long src = start + j;
      if (src < 0 || src >= static_cast<long>(frames)) continue;
      std::copy_n(input.data() + static_cast<std::size_t>(src) * channels, channels, dst + j * channels);
    }
  }
  return cols;
}

/// Folds patch gradients back onto the input frames (adjoint of im2col).
template <class T>
void col2im_add(const Tensor<T>& dcols, const ConvGeometry& g, Tensor<T>& dinput) {
  const std::size_t frames = dinput.dim(0), channels = dinput.dim(1);
  for (std::size_t t = 0; t < dcols.dim(0); ++t) {
    const T* src = dcols.data() + t * dcols.cols();
    const long start = static_cast<long>(t) * g.stride - g.padding;
    for (int j = 0; j < g.kernel; ++j) {
      const long dst = start + j;
      if (dst < 0 || dst >= static_cast<long>(frames)) continue;
      T* out = dinput.data() + static_cast<std::size_t>(dst) * channels;
      const T* in = src + j * channels;
      for (std::size_t c = 0; c < channels; ++c) out[c] += in[c];
    }
  }
}

template <class T>
Tensor<T> conv1d_from_cols(const Tensor<T>& cols, const Tensor<T>& weight, const Tensor<T>& bias) {
  const std::size_t out_ch = weight.dim(2);
  Tensor<T> out({cols.dim(0), out_ch});
  auto y = as_matrix(out, cols.dim(0), out_ch);
  y.noalias() = as_matrix(cols, cols.dim(0), cols.dim(1)) * as_matrix(weight, cols.dim(1), out_ch);
  y.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias.data(), static_cast<Eigen::Index>(out_ch));
  return out;
}

template <class T>
Tensor<T> conv1d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias, const ConvGeometry& g) {
  check_conv1d(input, weight, bias, g);
  return conv1d_from_cols(im2col(input, g), weight, bias);
}

/// Accumulates conv1d gradients. `cols` is the forward im2col of the input.
template <class T>
void conv1d_backward(const Tensor<T>& cols, const Tensor<T>& weight, const Tensor<T>& dout, const ConvGeometry& g,
                     Tensor<T>* dinput, Tensor<T>* dweight, Tensor<T>* dbias) {
  const auto n = static_cast<Eigen::Index>(cols.dim(0));
  const auto kc = static_cast<Eigen::Index>(cols.dim(1));
  const auto out_ch = static_cast<Eigen::Index>(weight.dim(2));
  const ConstMatrixMap<T> dy(dout.data(), n, out_ch);
  if (dweight) {
    MatrixMap<T>(dweight->data(), kc, out_ch).noalias() += ConstMatrixMap<T>(cols.data(), n, kc).transpose() * dy;
  }
  if (dbias) {
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(dbias->data(), out_ch) += dy.colwise().sum();
  }
  if (dinput) {
    Tensor<T> dcols({cols.dim(0), cols.dim(1)});
    as_matrix(dcols, cols.dim(0), cols.dim(1)).noalias() = dy * ConstMatrixMap<T>(weight.data(), kc, out_ch).transpose();
    col2im_add(dcols, g, *dinput);
  }
}

/// Affine map on the trailing dimension: input [N x Din], weight [Din x Dout], bias [Dout].
template <class T>
Tensor<T> linear(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (weight.rank() != 2 || input.cols() != weight.dim(0))
    throw ShapeError("linear: input " + shape_str(input.shape()) + " trailing dim does not match weight " +
                     shape_str(weight.shape()));
  if (bias.rank() != 1 || bias.dim(0) != weight.dim(1))
    throw ShapeError("linear: bias " + shape_str(bias.shape()) + " does not match weight " + shape_str(weight.shape()));
  Shape out_shape = input.shape();
  out_shape.back() = weight.dim(1);
  Tensor<T> out(out_shape);
  const std::size_t n = input.rows(), din = weight.dim(0), dout = weight.dim(1);
  auto y = as_matrix(out, n, dout);
  y.noalias() = as_matrix(input, n, din) * as_matrix(weight, din, dout);
  y.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias.data(), static_cast<Eigen::Index>(dout));
  return out;
}

template <class T>
void linear_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& dout, Tensor<T>* dinput,
                     Tensor<T>* dweight, Tensor<T>* dbias) {
  const auto n = static_cast<Eigen::Index>(input.rows());
  const auto din = static_cast<Eigen::Index>(weight.dim(0));
  const auto dk = static_cast<Eigen::Index>(weight.dim(1));
  const ConstMatrixMap<T> dy(dout.data(), n, dk);
  if (dweight) MatrixMap<T>(dweight->data(), din, dk).noalias() += ConstMatrixMap<T>(input.data(), n, din).transpose() * dy;
  if (dbias) Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(dbias->data(), dk) += dy.colwise().sum();
  if (dinput) MatrixMap<T>(dinput->data(), n, din).noalias() += dy * ConstMatrixMap<T>(weight.data(), din, dk).transpose();
}

/// Sub-pixel rearrangement: out[t*r + j, c] = in[t, j*C + c]. With row-major
/// storage this is a relabelling of the shape; the payload is unchanged.
template <class T>
Tensor<T> pixel_shuffle_1d(Tensor<T> input, int r) {
  if (r < 1) throw ArgumentError("pixel_shuffle_1d: factor " + std::to_string(r) + " must be >= 1");
  if (input.rank() != 2) throw ShapeError("pixel_shuffle_1d: input must be [frames x channels]");
  const std::size_t ru = static_cast<std::size_t>(r);
  if (input.dim(1) % ru != 0)
    throw ShapeError("pixel_shuffle_1d: " + std::to_string(input.dim(1)) + " channels not divisible by r=" +
                     std::to_string(r));
  input.reshape({input.dim(0) * ru, input.dim(1) / ru});
  return input;
}

/// Exact inverse of pixel_shuffle_1d.
template <class T>
Tensor<T> pixel_unshuffle_1d(Tensor<T> input, int r) {
  if (r < 1) throw ArgumentError("pixel_unshuffle_1d: factor " + std::to_string(r) + " must be >= 1");
  if (input.rank() != 2) throw ShapeError("pixel_unshuffle_1d: input must be [frames x channels]");
  const std::size_t ru = static_cast<std::size_t>(r);
  if (input.dim(0) % ru != 0)
    throw ShapeError("pixel_unshuffle_1d: " + std::to_string(input.dim(0)) + " frames not divisible by r=" +
                     std::to_string(r));
  input.reshape({input.dim(0) / ru, input.dim(1) * ru});
  return input;
}

/// Mean over non-overlapping windows of `window` frames (kernel = stride = window).
template <class T>
Tensor<T> avg_pool_1d(const Tensor<T>& input, int window) {
  if (window < 1) throw ArgumentError("avg_pool_1d: window " + std::to_string(window) + " must be >= 1");
  if (input.rank() != 2) throw ShapeError("avg_pool_1d: input must be [frames x channels]");
  const std::size_t frames = input.dim(0), channels = input.dim(1), w = static_cast<std::size_t>(window);
  if (frames % w != 0)
    throw ShapeError("avg_pool_1d: T=" + std::to_string(frames) + " not divisible by window=" + std::to_string(window));
  Tensor<T> out({frames / w, channels});
  const T inv = T(1) / static_cast<T>(w);
  for (std::size_t o = 0; o < frames / w; ++o) {
    T* dst = out.data() + o * channels;
    for (std::size_t m = 0; m < w; ++m) {
      const T* src = input.data() + (o * w + m) * channels;
      for (std::size_t c = 0; c < channels; ++c) dst[c] += src[c];
    }
    for (std::size_t c = 0; c < channels; ++c) dst[c] *= inv;
  }
  return out;
}

template <class T>
void avg_pool_1d_backward(const Tensor<T>& dout, int window, Tensor<T>& dinput) {
  const std::size_t channels = dinput.dim(1), w = static_cast<std::size_t>(window);
  const T inv = T(1) / static_cast<T>(w);
  for (std::size_t o = 0; o < dout.dim(0); ++o) {
    const T* src = dout.data() + o * channels;
    for (std::size_t m = 0; m < w; ++m) {
      T* dst = dinput.data() + (o * w + m) * channels;
      for (std::size_t c = 0; c < channels; ++c) dst[c] += src[c] * inv;
    }
  }
}

/// Euclidean norm of the flattened difference.
template <class T>
T l2_distance(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "l2_distance");
  T acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const T d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

template <class T>
Tensor<T> softmax(const Tensor<T>& logits) {
  Tensor<T> p(logits.shape());
  T mx = -std::numeric_limits<T>::infinity();
  for (T v : logits.values()) mx = std::max(mx, v);
  T total = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += (p[i] = std::exp(logits[i] - mx));
  for (auto& v : p.values()) v /= total;
  return p;
}

/// -log softmax(logits)[target], evaluated with a shifted log-sum-exp.
template <class T>
T softmax_cross_entropy(const Tensor<T>& logits, std::size_t target) {
  if (logits.size() < 2) throw ArgumentError("softmax_cross_entropy: need at least 2 classes");
  if (target >= logits.size())
    throw ArgumentError("softmax_cross_entropy: target " + std::to_string(target) + " out of range for " +
                        std::to_string(logits.size()) + " classes");
  T mx = -std::numeric_limits<T>::infinity();
  for (T v : logits.values()) mx = std::max(mx, v);
  T total = 0;
  for (T v : logits.values()) total += std::exp(v - mx);
  return std::log(total) + mx - logits[target];
}

}  // namespace kernels
}  // namespace lrvc
