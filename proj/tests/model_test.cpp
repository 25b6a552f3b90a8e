// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lrvc/compute.hpp"
#include "lrvc/losses.hpp"
#include "lrvc/model.hpp"

namespace lrvc {
namespace {

template <class T>
Tensor<T> random_tensor(Shape shape, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  Tensor<T> t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<T>(scale * normal(rng));
  return t;
}

ModelConfig narrow(ResampleSpec spec = {}) {
  ModelConfig c;
  c.content_dim = 16;
  c.mel_dim = 8;
  c.speaker_dim = 8;
  c.speaker_hidden = 8;
  c.decoder_hidden = 8;
  c.spec = spec;
  return c;
}

/// Two conv layers per stack, d_c = 8, d_s = 4.
ModelConfig miniature() {
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
  c.init_seed = 4;
  return c;
}

TEST(ResampleLength, CanonicalRatio) { EXPECT_EQ(resample_length(100, {5, 8}), 160u); }

TEST(ResampleLength, IdentityRatio) {
  for (std::size_t t = 1; t < 50; ++t) EXPECT_EQ(resample_length(t, {1, 1}), t);
}

TEST(ResampleLength, FractionalLengthNamesOperands) {
  try {
    resample_length(7, {5, 8});
    FAIL();
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("d_inp=7"), std::string::npos);
    EXPECT_NE(msg.find("p=5"), std::string::npos);
    EXPECT_NE(msg.find("q=8"), std::string::npos);
  }
}

TEST(ResampleLength, RejectsNonCoprimeSpec) { EXPECT_THROW(resample_length(10, {2, 4}), ArgumentError); }

TEST(ShuffleStages, FactorsIntoTwosAndOddRest) {
  EXPECT_EQ(shuffle_stages(8), (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(shuffle_stages(12), (std::vector<int>{2, 2, 3}));
  EXPECT_EQ(shuffle_stages(3), (std::vector<int>{3}));
  EXPECT_TRUE(shuffle_stages(1).empty());
}

TEST(ShuffleStages, DefaultPlacementAfterLayersFourEightTwelve) {
  ModelConfig c;
  const auto up = c.layer_upsampling();
  for (std::size_t l = 0; l < 12; ++l) EXPECT_EQ(up[l], (l == 3 || l == 7 || l == 11) ? 2 : 1) << l;
  c.shuffle_after = {1, 1, 2};
  const auto custom = c.layer_upsampling();
  EXPECT_EQ(custom[0], 4);
  EXPECT_EQ(custom[1], 2);
  c.shuffle_after = {1, 2};
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Decoder, LengthLawAcrossSpecs) {
  for (ResampleSpec spec : {ResampleSpec{1, 1}, {1, 2}, {2, 3}, {3, 4}, {5, 8}}) {
    const Model<float> model(narrow(spec));
    const auto s = random_tensor<float>({8}, 1);
    for (std::size_t t = static_cast<std::size_t>(spec.p); t <= 200; t += static_cast<std::size_t>(spec.p)) {
      const auto mel = model.decode(random_tensor<float>({t, 16}, t), s);
      EXPECT_EQ(mel.dim(0), t * static_cast<std::size_t>(spec.q) / static_cast<std::size_t>(spec.p))
          << "p=" << spec.p << " q=" << spec.q << " T=" << t;
      EXPECT_EQ(mel.dim(1), 8u);
    }
  }
}

TEST(Decoder, FullSizeHundredFramesToHundredSixty) {
  const Model<float> model(ModelConfig{});
  const auto mel = model.decode(random_tensor<float>({100, 256}, 2), random_tensor<float>({128}, 3));
  EXPECT_EQ(mel.shape(), (Shape{160, 80}));
  EXPECT_TRUE(mel.all_finite());
}

TEST(Decoder, FractionalLengthIsShapeError) {
  const Model<float> model(narrow());
  EXPECT_THROW(model.decode(random_tensor<float>({7, 16}, 1), random_tensor<float>({8}, 1)), ShapeError);
}

TEST(Decoder, SpeakerPathIsLive) {
  const Model<float> model(narrow());
  const auto c = random_tensor<float>({20, 16}, 5);
  const auto a = model.decode(c, random_tensor<float>({8}, 6));
  const auto b = model.decode(c, random_tensor<float>({8}, 7));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NE(a[i], b[i]) << i;
}

TEST(FuseSpeaker, ShapeZeroAndLinearity) {
  Tape<float> tape;
  const auto c = tape.constant(random_tensor<float>({100, 256}, 1));
  const auto s = random_tensor<float>({128}, 2);
  const auto fused = fuse_speaker(c, tape.constant(s)).value();
  EXPECT_EQ(fused.shape(), (Shape{100, 384}));
  const auto zero = fuse_speaker(c, tape.constant(Tensor<float>({128}))).value();
  Tensor<float> s3 = s;
  for (auto& v : s3.values()) v *= 3.0f;
  const auto scaled = fuse_speaker(c, tape.constant(s3)).value();
  for (std::size_t t = 0; t < 100; ++t)
    for (std::size_t j = 0; j < 384; ++j) {
      if (j >= 256) {
        EXPECT_EQ(zero(t, j), 0.0f);
        EXPECT_EQ(scaled(t, j), 3.0f * fused(t, j));
      } else {
        EXPECT_EQ(scaled(t, j), fused(t, j));
      }
    }
}

TEST(SpeakerEncoder, OutputDimForAnyLength) {
  const Model<float> model(ModelConfig{});
  for (std::size_t t : {1u, 2u, 7u, 160u}) EXPECT_EQ(model.encode_speaker(random_tensor<float>({t, 80}, t)).shape(), (Shape{128}));
}

TEST(SpeakerEncoder, Deterministic) {
  const Model<float> model(narrow());
  const auto mel = random_tensor<float>({30, 8}, 9);
  EXPECT_EQ(model.encode_speaker(mel), model.encode_speaker(mel));
  const Model<float> twin(narrow());
  EXPECT_EQ(twin.encode_speaker(mel), model.encode_speaker(mel));
}

TEST(ProjectionHead, ZeroInputGivesBias) {
  ModelConfig c = narrow();
  c.num_speakers = 8;
  Model<float> model(c);
  for (auto* p : model.parameters()) {
    if (p->name == "projection.weight") p->value.fill(0.0f);
    if (p->name == "projection.bias")
      for (std::size_t i = 0; i < 8; ++i) p->value[i] = static_cast<float>(i) - 3.5f;
  }
  const auto logits = model.project(Tensor<float>({8}));
  ASSERT_EQ(logits.shape(), (Shape{8}));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(logits[i], static_cast<float>(i) - 3.5f);
}

TEST(ProjectionHead, CrossEntropyGradientWrtEmbedding) {
  Model<double> model(miniature());
  Parameter<double> s("s", random_tensor<double>({4}, 3));
  auto fn = [&](Tape<double>& t) { return ops::softmax_cross_entropy(model.project(t, t.param(s)), 1); };
  const auto report = grad_check(fn, {&s}, {.epsilon = 1e-6});
  EXPECT_TRUE(report.passed()) << report.max_relative_error;
}

TEST(ModelGradient, MiniatureSelfSame) {
  Model<double> model(miniature());
  PairExample<double> ex{random_tensor<double>({10, 8}, 1), {}, random_tensor<double>({16, 6}, 2), {}, 0};
  auto fn = [&](Tape<double>& t) { return sample_objective(t, model, ex, LossMode::SelfSame, {}).total; };
  const auto report = grad_check(fn, model.parameters(), {.epsilon = 1e-6, .floor = 1e-5});
  EXPECT_TRUE(report.passed()) << report.worst_parameter << "[" << report.worst_index << "] " << report.max_relative_error << " analytic " << report.worst_analytic << " numeric " << report.worst_numeric;
  EXPECT_GT(report.entries_checked, 100u);
}

TEST(ModelGradient, MiniatureSelfDiffBoth) {
  Model<double> model(miniature());
  PairExample<double> ex{random_tensor<double>({10, 8}, 1), random_tensor<double>({10, 8}, 3),
                         random_tensor<double>({16, 6}, 2), random_tensor<double>({16, 6}, 4), 2};
  auto fn = [&](Tape<double>& t) { return sample_objective(t, model, ex, LossMode::SelfDiffBoth, {}).total; };
  const auto report = grad_check(fn, model.parameters(), {.epsilon = 1e-6, .floor = 1e-5});
  EXPECT_TRUE(report.passed()) << report.worst_parameter << "[" << report.worst_index << "] " << report.max_relative_error << " analytic " << report.worst_analytic << " numeric " << report.worst_numeric;
}

TEST(Model, FloatCopyOfDoubleMatches) {
  Model<double> d(miniature());
  Model<float> f(miniature());
  for (auto* p : d.parameters())
    for (auto& v : p->value.values()) v += 0.25;
  f.assign_from(d);
  EXPECT_FLOAT_EQ(f.parameters()[0]->value[0], static_cast<float>(d.parameters()[0]->value[0]));
}

TEST(ModelConfig, HashTracksArchitecture) {
  ModelConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.decoder_hidden = 64;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(ModelConfig, UnknownKeyNamed) {
  ModelConfig c;
  try {
    apply_model_config_json(nlohmann::json{{"decoder_hiden", 3}}, c);
    FAIL();
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("model.decoder_hiden"), std::string::npos);
  }
}

}  // namespace
}  // namespace lrvc
