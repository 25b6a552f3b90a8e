// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lrvc/compute/grad_check.hpp"
#include "lrvc/compute/init.hpp"
#include "lrvc/compute/ops.hpp"
#include "lrvc/losses/losses.hpp"
#include "lrvc/model/model.hpp"

namespace lrvc {

struct NamedGradCheck {
  std::string name;
  GradCheckReport report;
};

struct GradSuiteOptions {
  std::uint64_t seed = 0;
  double tolerance = 1e-3;
  /// Test hook: added to every reverse-mode entry so the suite must fail.
  double corruption = 0.0;
};

inline bool all_passed(const std::vector<NamedGradCheck>& checks) {
  for (const auto& c : checks)
    if (!c.report.passed()) return false;
  return !checks.empty();
}

namespace detail {

inline Tensor<double> gaussian(Shape shape, std::mt19937_64& rng) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.values()) v = normal(rng);
  return t;
}

inline GradCheckOptions check_options(const GradSuiteOptions& o, double floor = 1e-6) {
  GradCheckOptions g;
  g.epsilon = 1e-6;
  g.floor = floor;
  g.tolerance = o.tolerance;
  g.seed = o.seed;
  g.analytic_perturbation = o.corruption;
  return g;
}

}  // namespace detail

/// One finite-difference check per differentiable op, each driven through
/// an l2 or cross-entropy head so the scalar depends on every output entry.
inline std::vector<NamedGradCheck> op_grad_suite(const GradSuiteOptions& o = {}) {
  using detail::gaussian;
  std::mt19937_64 rng(mix_seed(o.seed, 0x0b5));
  const auto opt = detail::check_options(o);
  std::vector<NamedGradCheck> out;

  {
    Parameter<double> x("x", gaussian({10, 4}, rng)), w("w", gaussian({5, 4, 3}, rng)), b("b", gaussian({3}, rng));
    const Tensor<double> target = gaussian({5, 3}, rng);
    auto fn = [&](Tape<double>& t) {
      return ops::l2_distance(ops::conv1d(t.param(x), t.param(w), t.param(b), {5, 2, 2}), t.constant(target));
    };
    out.push_back({"conv1d", grad_check(fn, {&x, &w, &b}, opt)});
  }
  {
    Parameter<double> x("x", gaussian({3, 4}, rng)), w("w", gaussian({4, 2}, rng)), b("b", gaussian({2}, rng));
    const Tensor<double> target = gaussian({3, 2}, rng);
    auto fn = [&](Tape<double>& t) {
      return ops::l2_distance(ops::linear(t.param(x), t.param(w), t.param(b)), t.constant(target));
    };
    out.push_back({"linear", grad_check(fn, {&x, &w, &b}, opt)});
  }
  {
    Parameter<double> x("x", gaussian({7, 8}, rng));
    const Tensor<double> target = gaussian({28, 2}, rng);
    auto fn = [&](Tape<double>& t) {
      return ops::l2_distance(ops::pixel_shuffle_1d(t.param(x), 4), t.constant(target));
    };
    out.push_back({"pixel_shuffle_1d", grad_check(fn, {&x}, opt)});
  }
  {
    Parameter<double> x("x", gaussian({10, 3}, rng));
    const Tensor<double> target = gaussian({2, 3}, rng);
    auto fn = [&](Tape<double>& t) { return ops::l2_distance(ops::avg_pool_1d(t.param(x), 5), t.constant(target)); };
    out.push_back({"avg_pool_1d", grad_check(fn, {&x}, opt)});
  }
  {
    // Entries kept away from the kink at zero.
    Tensor<double> init = gaussian({6, 3}, rng);
    for (auto& v : init.values()) v += v >= 0 ? 0.1 : -0.1;
    Parameter<double> x("x", std::move(init));
    const Tensor<double> target = gaussian({6, 3}, rng);
    auto fn = [&](Tape<double>& t) { return ops::l2_distance(ops::relu(t.param(x)), t.constant(target)); };
    out.push_back({"relu", grad_check(fn, {&x}, opt)});
  }
  {
    Parameter<double> a("a", gaussian({4, 3}, rng)), b("b", gaussian({4, 3}, rng));
    const Tensor<double> target = gaussian({4, 3}, rng);
    auto fn = [&](Tape<double>& t) {
      return ops::l2_distance(ops::add(t.param(a), ops::scale(t.param(b), 0.7)), t.constant(target));
    };
    out.push_back({"add_scale", grad_check(fn, {&a, &b}, opt)});
  }
  {
    Parameter<double> x("x", gaussian({9, 4}, rng));
    const Tensor<double> target = gaussian({4}, rng);
    auto fn = [&](Tape<double>& t) { return ops::l2_distance(ops::mean_frames(t.param(x)), t.constant(target)); };
    out.push_back({"mean_frames", grad_check(fn, {&x}, opt)});
  }
  {
    Parameter<double> x("x", gaussian({5, 3}, rng)), v("v", gaussian({2}, rng));
    const Tensor<double> target = gaussian({5, 5}, rng);
    auto fn = [&](Tape<double>& t) {
      return ops::l2_distance(ops::concat_broadcast(t.param(x), t.param(v)), t.constant(target));
    };
    out.push_back({"concat_broadcast", grad_check(fn, {&x, &v}, opt)});
  }
  {
    Parameter<double> a("a", gaussian({6}, rng)), b("b", gaussian({6}, rng));
    auto fn = [&](Tape<double>& t) { return ops::l2_distance(t.param(a), t.param(b)); };
    out.push_back({"l2_distance", grad_check(fn, {&a, &b}, opt)});
  }
  {
    Parameter<double> z("logits", gaussian({8}, rng));
    auto fn = [&](Tape<double>& t) { return ops::softmax_cross_entropy(t.param(z), 3); };
    out.push_back({"softmax_cross_entropy", grad_check(fn, {&z}, opt)});
  }
  return out;
}

/// Miniature network: two conv layers per stack, d_c = 8, d_s = 4.
inline ModelConfig miniature_model_config(std::uint64_t seed = 4) {
  ModelConfig c;
  c.content_dim = 8;
  c.mel_dim = 6;
  c.speaker_dim = 4;
  c.num_speakers = 3;
  c.speaker_hidden = 5;
  c.speaker_conv_layers = 2;
  c.speaker_fc_layers = 2;
  c.decoder_hidden = 5;
  c.decoder_layers = 2;
  c.init_seed = seed;
  return c;
}

/// Full objective of every loss mode on the miniature network, T_inp = 10.
/// Losses here are O(10), so central differences carry about 1e-9 of
/// round-off; entries with |gradient| < 1e-5 are judged on absolute error.
inline std::vector<NamedGradCheck> model_grad_suite(const GradSuiteOptions& o = {}) {
  const ModelConfig config = miniature_model_config(mix_seed(o.seed, 0x70d));
  std::mt19937_64 rng(mix_seed(o.seed, 0xda7a));
  const std::size_t t_out = resample_length(10, config.spec);
  PairExample<double> ex{detail::gaussian({10, config.content_dim}, rng),
                         detail::gaussian({10, config.content_dim}, rng),
                         detail::gaussian({t_out, config.mel_dim}, rng),
                         detail::gaussian({t_out, config.mel_dim}, rng), 2};
  std::vector<NamedGradCheck> out;
  for (LossMode mode : kAllModes) {
    Model<double> model(config);
    auto fn = [&](Tape<double>& t) { return sample_objective(t, model, ex, mode, {}).total; };
    out.push_back({std::string("model/") + mode_name(mode), grad_check(fn, model.parameters(), detail::check_options(o, 1e-5))});
  }
  return out;
}

}  // namespace lrvc
