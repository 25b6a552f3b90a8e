// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "lrvc/audio/segment.hpp"

namespace lrvc {

namespace detail {

/// Kaiser-windowed sinc low-pass with unit DC gain per output phase, scaled
/// by `up` to compensate zero stuffing. `cutoff` is in cycles per sample of
/// the upsampled stream.
inline std::vector<double> lowpass_taps(int half, double cutoff, int up) {
  constexpr double beta = 8.6;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  for (int k = -half; k <= half; ++k) {
    const double x = 2.0 * cutoff * k;
    const double sinc = k == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = static_cast<double>(k) / (half + 1);
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / i0_beta;
    h[static_cast<std::size_t>(k + half)] = 2.0 * cutoff * sinc * window;
  }
  const double total = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v *= up / total;
  return h;
}

inline long reflect_index(long n, long size) {
  if (size == 1) return 0;
  const long period = 2 * (size - 1);
  n %= period;
  if (n < 0) n += period;
  return n < size ? n : period - n;
}

}  // namespace detail

/// Rational-ratio resampling by up/down with an anti-aliasing low-pass whose
/// cutoff sits at 90% of the lower Nyquist frequency. Edges are mirrored.
inline AudioSegment resample_rational(const AudioSegment& in, int up, int down) {
  if (up < 1 || down < 1) throw ArgumentError("resample: factors must be >= 1");
  if (in.samples.empty()) throw ArgumentError("resample: empty segment");
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  if ((static_cast<long>(in.sample_rate) * up) % down != 0)
    throw ArgumentError("resample: " + std::to_string(in.sample_rate) + " Hz is not divisible by the ratio " +
                        std::to_string(up) + "/" + std::to_string(down));
  if (up == 1 && down == 1) return in;
  const int widest = std::max(up, down);
  const int half = 56 * widest;
  const std::vector<double> h = detail::lowpass_taps(half, 0.9 * 0.5 / widest, up);

  const long n_in = static_cast<long>(in.samples.size());
  const long n_out = n_in * up / down;
  AudioSegment out{std::vector<float>(static_cast<std::size_t>(n_out)), in.sample_rate * up / down};
  for (long m = 0; m < n_out; ++m) {
    const long pos = m * down;  // position on the upsampled grid
    // Input samples n with |pos - n*up| <= half.
    const long n_lo = static_cast<long>(std::ceil(static_cast<double>(pos - half) / up));
    const long n_hi = static_cast<long>(std::floor(static_cast<double>(pos + half) / up));
    double acc = 0;
    for (long n = n_lo; n <= n_hi; ++n) {
      const long tap = pos - n * up + half;
      acc += h[static_cast<std::size_t>(tap)] * in.samples[static_cast<std::size_t>(detail::reflect_index(n, n_in))];
    }
    out.samples[static_cast<std::size_t>(m)] = static_cast<float>(acc);
  }
  return out;
}

/// Low-pass filtered integer-factor downsampling (48 kHz -> 24 kHz with 2,
/// 48 kHz -> 16 kHz with 3; 6 serves the two-stage equivalence check).
inline AudioSegment decimate(const AudioSegment& in, int factor) {
  if (factor != 2 && factor != 3 && factor != 6)
    throw ArgumentError("decimate: unsupported factor " + std::to_string(factor) + " (expected 2, 3 or 6)");
  if (in.sample_rate % factor != 0)
    throw ArgumentError("decimate: " + std::to_string(in.sample_rate) + " Hz is not divisible by " +
                        std::to_string(factor));
  return resample_rational(in, 1, factor);
}

/// Converts to a target rate among the supported ones.
inline AudioSegment resample_to(const AudioSegment& in, int rate) {
  if (in.sample_rate == rate) return in;
  const int g = std::gcd(in.sample_rate, rate);
  return resample_rational(in, rate / g, in.sample_rate / g);
}

}  // namespace lrvc
