// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrvc/compute/ops.hpp"
#include "lrvc/model/model.hpp"

namespace lrvc {

enum class LossMode { SelfSame, SelfDiff, SelfDiffCycle, SelfDiffSpeaker, SelfDiffBoth };

inline constexpr std::array<LossMode, 5> kAllModes{LossMode::SelfSame, LossMode::SelfDiff, LossMode::SelfDiffCycle,
                                                   LossMode::SelfDiffSpeaker, LossMode::SelfDiffBoth};

inline std::string mode_name(LossMode m) {
  switch (m) {
    case LossMode::SelfSame: return "self-same";
    case LossMode::SelfDiff: return "self-diff";
    case LossMode::SelfDiffCycle: return "self-diff+cycle";
    case LossMode::SelfDiffSpeaker: return "self-diff+speaker";
    case LossMode::SelfDiffBoth: return "self-diff+both";
  }
  return "?";
}

inline LossMode parse_mode(const std::string& s) {
  for (LossMode m : kAllModes)
    if (mode_name(m) == s) return m;
  throw ArgumentError("unknown loss mode '" + s +
                      "' (expected self-same, self-diff, self-diff+cycle, self-diff+speaker or self-diff+both)");
}

inline bool uses_cycle(LossMode m) { return m == LossMode::SelfDiffCycle || m == LossMode::SelfDiffBoth; }
inline bool uses_speaker(LossMode m) { return m == LossMode::SelfDiffSpeaker || m == LossMode::SelfDiffBoth; }

struct LossWeights {
  double cycle = 1.0;
  double speaker = 1.0;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Scalar loss values. Components a mode does not use stay 0.
struct LossBreakdown {
  double self_same = 0;
  double self_diff = 0;
  double cycle = 0;
  double speaker = 0;
  double total = 0;
  LossWeights weights;

  LossBreakdown& operator+=(const LossBreakdown& o) {
    self_same += o.self_same, self_diff += o.self_diff, cycle += o.cycle, speaker += o.speaker, total += o.total;
    return *this;
  }
  LossBreakdown& operator*=(double f) {
    self_same *= f, self_diff *= f, cycle *= f, speaker *= f, total *= f;
    return *this;
  }
};

inline nlohmann::ordered_json breakdown_json(const LossBreakdown& b) {
  return nlohmann::ordered_json{{"self_same", b.self_same}, {"self_diff", b.self_diff}, {"cycle", b.cycle},
                                {"speaker", b.speaker},     {"total", b.total}};
}

template <class T>
Var<T> loss_self_same(Var<T> x, Var<T> x_hat) {
  return ops::l2_distance(x, x_hat);
}

/// ||x_u - x̂_u|| + ||x_v - x̂_v|| with x̂_u = D(c_u, s_v), x̂_v = D(c_v, s_u).
template <class T>
Var<T> loss_self_diff(Var<T> x_u, Var<T> x_v, Var<T> x_hat_u, Var<T> x_hat_v) {
  return ops::sum<T>({ops::l2_distance(x_u, x_hat_u), ops::l2_distance(x_v, x_hat_v)});
}

/// ||s_u - s_v|| + ||s_u - s'_u|| + ||s_v - s'_v|| where s' re-encodes the
/// decoded mels.
template <class T>
Var<T> loss_cycle(Var<T> s_u, Var<T> s_v, Var<T> s_re_u, Var<T> s_re_v) {
  return ops::sum<T>({ops::l2_distance(s_u, s_v), ops::l2_distance(s_u, s_re_u), ops::l2_distance(s_v, s_re_v)});
}

/// Cross-entropy of both projected embeddings against the shared label.
template <class T>
Var<T> loss_speaker(Var<T> logits_u, Var<T> logits_v, std::size_t label) {
  return ops::sum<T>({ops::softmax_cross_entropy(logits_u, label), ops::softmax_cross_entropy(logits_v, label)});
}

/// total = base + λc·cycle + λs·speaker, accumulated in that order so that a
/// disabled or zero-weighted term leaves the sum bit-identical.
template <class T>
Var<T> total_loss(Var<T> base, const Var<T>* cycle, const Var<T>* speaker, const LossWeights& w) {
  std::vector<Var<T>> terms{base};
  if (cycle) terms.push_back(ops::scale(*cycle, static_cast<T>(w.cycle)));
  if (speaker) terms.push_back(ops::scale(*speaker, static_cast<T>(w.speaker)));
  return terms.size() == 1 ? base : ops::sum(terms);
}

/// Features of one training example. In self-same mode only the u side is read.
template <class T>
struct PairExample {
  Tensor<T> content_u, content_v;  // [T_inp x d_c]
  Tensor<T> mel_u, mel_v;          // [T_out x d]
  std::size_t speaker = 0;         // training-speaker index
};

template <class T>
struct SampleObjective {
  Var<T> total;
  LossBreakdown values;
};

/// Records the forward pass of one example for `mode` on `tape`.
template <class T>
SampleObjective<T> sample_objective(Tape<T>& tape, const Model<T>& model, const PairExample<T>& ex, LossMode mode,
                                    const LossWeights& w) {
  SampleObjective<T> out;
  out.values.weights = w;
  const Var<T> c_u = tape.constant(ex.content_u);
  const Var<T> x_u = tape.constant(ex.mel_u);
  const Var<T> s_u = model.encode_speaker(tape, x_u);
  if (mode == LossMode::SelfSame) {
    out.total = loss_self_same(x_u, model.decode(tape, c_u, s_u));
    out.values.self_same = out.values.total = static_cast<double>(out.total.value()[0]);
    return out;
  }
  const Var<T> c_v = tape.constant(ex.content_v);
  const Var<T> x_v = tape.constant(ex.mel_v);
  const Var<T> s_v = model.encode_speaker(tape, x_v);
  const Var<T> x_hat_u = model.decode(tape, c_u, s_v);
  const Var<T> x_hat_v = model.decode(tape, c_v, s_u);
  const Var<T> base = loss_self_diff(x_u, x_v, x_hat_u, x_hat_v);
  out.values.self_diff = static_cast<double>(base.value()[0]);

  std::optional<Var<T>> cycle, speaker;
  if (uses_cycle(mode)) {
    cycle = loss_cycle(s_u, s_v, model.encode_speaker(tape, x_hat_u), model.encode_speaker(tape, x_hat_v));
    out.values.cycle = static_cast<double>(cycle->value()[0]);
  }
  if (uses_speaker(mode)) {
    speaker = loss_speaker(model.project(tape, s_u), model.project(tape, s_v), ex.speaker);
    out.values.speaker = static_cast<double>(speaker->value()[0]);
  }
  out.total = total_loss(base, cycle ? &*cycle : nullptr, speaker ? &*speaker : nullptr, w);
  out.values.total = static_cast<double>(out.total.value()[0]);
  return out;
}

}  // namespace lrvc
