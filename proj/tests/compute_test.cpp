// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lrvc/compute.hpp"

namespace lrvc {
namespace {

Tensor<double> random_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.values()) v = uniform(rng, -scale, scale);
  return t;
}

TEST(Conv1d, PointwiseScaling) {
  auto x = Tensor<float>::matrix(3, 1, {1, 2, 3});
  Tensor<float> w({1, 1, 1}, std::vector<float>{2});
  Tensor<float> b({1});
  auto y = kernels::conv1d(x, w, b, {1, 1, 0});
  EXPECT_EQ(y.shape(), (Shape{3, 1}));
  EXPECT_FLOAT_EQ(y[0], 2);
  EXPECT_FLOAT_EQ(y[1], 4);
  EXPECT_FLOAT_EQ(y[2], 6);
}

TEST(Conv1d, SumFilter) {
  auto x = Tensor<float>::matrix(5, 1, {1, 1, 1, 1, 1});
  Tensor<float> w({5, 1, 1}, std::vector<float>(5, 1.0f));
  auto y = kernels::conv1d(x, w, Tensor<float>({1}), {5, 1, 0});
  ASSERT_EQ(y.shape(), (Shape{1, 1}));
  EXPECT_FLOAT_EQ(y[0], 5);
}

TEST(Conv1d, ShapeLawExhaustive) {
  for (int kernel = 1; kernel <= 7; ++kernel)
    for (int stride = 1; stride <= 4; ++stride)
      for (int pad = 0; pad <= 3; ++pad)
        for (std::size_t frames = 1; frames <= 64; ++frames) {
          Tensor<float> x({frames, 2}, 1.0f);
          Tensor<float> w({static_cast<std::size_t>(kernel), 2, 3}, 0.5f);
          ConvGeometry g{kernel, stride, pad};
          if (static_cast<int>(frames) + 2 * pad < kernel) {
            EXPECT_THROW(kernels::conv1d(x, w, Tensor<float>({3}), g), ShapeError);
            continue;
          }
          auto y = kernels::conv1d(x, w, Tensor<float>({3}), g);
          const std::size_t expected = (frames + 2 * pad - kernel) / stride + 1;
          ASSERT_EQ(y.dim(0), expected) << "k=" << kernel << " s=" << stride << " p=" << pad << " T=" << frames;
        }
}

TEST(Conv1d, ShapeMismatchNamesDims) {
  Tensor<float> x({10, 4});
  Tensor<float> w({5, 3, 2});
  try {
    kernels::conv1d(x, w, Tensor<float>({2}), {5, 1, 2});
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("[5x3x2]"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("[10x4]"), std::string::npos) << e.what();
  }
}

TEST(Conv1d, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  Parameter<double> x("x", random_tensor({10, 4}, rng));
  Parameter<double> w("w", random_tensor({5, 4, 3}, rng));
  Parameter<double> b("b", random_tensor({3}, rng));
  Parameter<double> target("target", random_tensor({5, 3}, rng));
  auto fn = [&](Tape<double>& t) {
    auto y = ops::conv1d(t.param(x), t.param(w), t.param(b), {5, 2, 2});
    EXPECT_EQ(y.value().dim(0), 5u);
    return ops::l2_distance(y, t.constant(target.value));
  };
  auto report = grad_check(fn, {&x, &w, &b}, {.epsilon = 1e-5, .tolerance = 1e-4});
  EXPECT_TRUE(report.passed()) << report.worst_parameter << " " << report.max_relative_error;
  EXPECT_EQ(report.entries_checked, 40u + 60u + 3u);
}

TEST(PixelShuffle, IndexConvention) {
  auto x = Tensor<float>::matrix(1, 4, {1, 2, 3, 4});
  auto y = kernels::pixel_shuffle_1d(x, 2);
  ASSERT_EQ(y.shape(), (Shape{2, 2}));
  EXPECT_EQ(y.values(), (AlignedVector<float>{1, 2, 3, 4}));
  EXPECT_EQ(y(0, 0), 1);
  EXPECT_EQ(y(0, 1), 2);
  EXPECT_EQ(y(1, 0), 3);
  EXPECT_EQ(y(1, 1), 4);
}

TEST(PixelShuffle, GeneralIndexFormula) {
  std::mt19937_64 rng(3);
  const std::size_t frames = 3, channels = 4, r = 3;
  auto x = random_tensor({frames, channels * r}, rng).cast<float>();
  auto y = kernels::pixel_shuffle_1d(x, static_cast<int>(r));
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t c = 0; c < channels; ++c) EXPECT_EQ(y(t * r + j, c), x(t, j * channels + c));
}

TEST(PixelShuffle, IdentityForFactorOne) {
  std::mt19937_64 rng(4);
  auto x = random_tensor({5, 6}, rng).cast<float>();
  EXPECT_EQ(kernels::pixel_shuffle_1d(x, 1), x);
}

TEST(PixelShuffle, RoundTripIsBitExact) {
  std::mt19937_64 rng(5);
  for (int r : {1, 2, 4, 8}) {
    auto x = random_tensor({7, 8}, rng).cast<float>();
    EXPECT_EQ(kernels::pixel_unshuffle_1d(kernels::pixel_shuffle_1d(x, r), r), x) << "r=" << r;
  }
}

TEST(PixelShuffle, IndivisibleChannelsThrow) {
  EXPECT_THROW(kernels::pixel_shuffle_1d(Tensor<float>({2, 6}), 4), ShapeError);
}

TEST(AvgPool, MeanOfWindow) {
  auto x = Tensor<float>::matrix(5, 1, {1, 2, 3, 4, 5});
  auto y = kernels::avg_pool_1d(x, 5);
  ASSERT_EQ(y.shape(), (Shape{1, 1}));
  EXPECT_FLOAT_EQ(y[0], 3);
}

TEST(AvgPool, WindowOneIsIdentity) {
  std::mt19937_64 rng(6);
  auto x = random_tensor({6, 3}, rng).cast<float>();
  EXPECT_EQ(kernels::avg_pool_1d(x, 1), x);
}

TEST(AvgPool, ConstantInputStaysConstant) {
  Tensor<double> x({20, 3}, 0.75);
  for (int w : {1, 2, 4, 5, 10, 20}) {
    auto y = kernels::avg_pool_1d(x, w);
    for (double v : y.values()) EXPECT_DOUBLE_EQ(v, 0.75);
  }
}

TEST(AvgPool, PreservesGlobalMean) {
  std::mt19937_64 rng(8);
  for (int w : {2, 3, 5}) {
    auto x = random_tensor({30, 4}, rng);
    auto y = kernels::avg_pool_1d(x, w);
    double mx = 0, my = 0;
    for (double v : x.values()) mx += v;
    for (double v : y.values()) my += v;
    EXPECT_NEAR(mx / x.size(), my / y.size(), 1e-12);
  }
}

TEST(AvgPool, IndivisibleLengthNamesTAndWindow) {
  try {
    kernels::avg_pool_1d(Tensor<float>({7, 2}), 5);
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("T=7"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("window=5"), std::string::npos);
  }
}

TEST(Linear, IdentityWeights) {
  std::mt19937_64 rng(9);
  auto x = random_tensor({3, 4}, rng);
  Tensor<double> eye({4, 4});
  for (std::size_t i = 0; i < 4; ++i) eye(i, i) = 1;
  EXPECT_EQ(kernels::linear(x, eye, Tensor<double>({4})), x);
}

TEST(Linear, ZeroWeightsGiveBias) {
  Tensor<double> x({3, 4}, 2.0);
  auto b = Tensor<double>::vector({0.5, -1.5});
  auto y = kernels::linear(x, Tensor<double>({4, 2}), b);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(y(r, 0), 0.5);
    EXPECT_EQ(y(r, 1), -1.5);
  }
}

TEST(Linear, MatchesNaiveMatmul) {
  std::mt19937_64 rng(10);
  auto x = random_tensor({3, 4}, rng);
  auto w = random_tensor({4, 2}, rng);
  auto b = random_tensor({2}, rng);
  auto y = kernels::linear(x, w, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double acc = b[j];
      for (std::size_t k = 0; k < 4; ++k) acc += x(i, k) * w(k, j);
      EXPECT_NEAR(y(i, j), acc, 1e-12);
    }
}

TEST(Linear, VectorInputAndMismatch) {
  auto y = kernels::linear(Tensor<double>::vector({1, 2}), Tensor<double>({2, 3}, 1.0), Tensor<double>({3}));
  EXPECT_EQ(y.shape(), (Shape{3}));
  EXPECT_DOUBLE_EQ(y[2], 3.0);
  EXPECT_THROW(kernels::linear(Tensor<double>({2, 5}), Tensor<double>({4, 3}), Tensor<double>({3})), ShapeError);
}

TEST(CrossEntropy, UniformLogits) {
  Tensor<double> logits({4}, 0.3);
  EXPECT_NEAR(kernels::softmax_cross_entropy(logits, 2), std::log(4.0), 1e-12);
  EXPECT_NEAR(kernels::softmax_cross_entropy(logits, 2), 1.3863, 1e-4);
}

TEST(CrossEntropy, SaturatedCorrectClass) {
  EXPECT_NEAR(kernels::softmax_cross_entropy(Tensor<double>::vector({20, -20}), 0), 0.0, 1e-15);
}

TEST(CrossEntropy, TargetOutOfRange) {
  EXPECT_THROW(kernels::softmax_cross_entropy(Tensor<double>::vector({1, 2}), 2), ArgumentError);
  EXPECT_THROW(kernels::softmax_cross_entropy(Tensor<double>::vector({1}), 0), ArgumentError);
}

TEST(CrossEntropy, GradientIsSoftmaxMinusOneHot) {
  std::mt19937_64 rng(11);
  Parameter<double> logits("logits", random_tensor({8}, rng, 3.0));
  auto fn = [&](Tape<double>& t) { return ops::softmax_cross_entropy(t.param(logits), 5); };
  auto report = grad_check(fn, {&logits}, {.epsilon = 1e-6, .tolerance = 1e-5});
  EXPECT_TRUE(report.passed()) << report.max_relative_error;

  Tape<double> tape;
  logits.zero_grad();
  tape.backward(fn(tape));
  auto p = kernels::softmax(logits.value);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(logits.grad[i], p[i] - (i == 5 ? 1.0 : 0.0), 1e-14);
}

TEST(L2Distance, Basics) {
  auto a = Tensor<double>::vector({3, 0});
  auto b = Tensor<double>::vector({0, 4});
  EXPECT_DOUBLE_EQ(kernels::l2_distance(a, b), 5.0);
  EXPECT_DOUBLE_EQ(kernels::l2_distance(a, a), 0.0);
  EXPECT_THROW(kernels::l2_distance(a, Tensor<double>::vector({1, 2, 3})), ShapeError);
}

TEST(L2Distance, MatchesNaiveOracle) {
  std::mt19937_64 rng(12);
  auto a = random_tensor({13, 7}, rng);
  auto b = random_tensor({13, 7}, rng);
  double acc = 0;
  for (std::size_t r = 0; r < 13; ++r)
    for (std::size_t c = 0; c < 7; ++c) acc += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
  EXPECT_NEAR(kernels::l2_distance(a, b), std::sqrt(acc), 1e-9);
}

TEST(L2Distance, GradientBothArguments) {
  std::mt19937_64 rng(13);
  Parameter<double> a("a", random_tensor({4, 3}, rng));
  Parameter<double> b("b", random_tensor({4, 3}, rng));
  auto report = grad_check([&](Tape<double>& t) { return ops::l2_distance(t.param(a), t.param(b)); }, {&a, &b});
  EXPECT_TRUE(report.passed()) << report.max_relative_error;
  EXPECT_LT(report.max_relative_error, 1e-5);
}

TEST(GradCheck, DistanceToZero) {
  std::mt19937_64 rng(14);
  Parameter<double> p("p", random_tensor({6}, rng));
  auto fn = [&](Tape<double>& t) { return ops::l2_distance(t.param(p), t.constant(Tensor<double>({6}))); };
  auto report = grad_check(fn, {&p}, {.epsilon = 1e-5});
  EXPECT_LT(report.max_relative_error, 1e-5);
}

TEST(GradCheck, ConstantFunctionHasZeroGradients) {
  Parameter<double> p("p", Tensor<double>::vector({1, 2, 3}));
  auto fn = [&](Tape<double>& t) {
    t.param(p);
    return t.constant(Tensor<double>::scalar(4.2));
  };
  auto report = grad_check(fn, {&p});
  EXPECT_EQ(report.max_relative_error, 0.0);
  EXPECT_EQ(report.worst_analytic, 0.0);
  EXPECT_EQ(report.worst_numeric, 0.0);
}

TEST(GradCheck, CorruptedGradientFails) {
  Parameter<double> p("p", Tensor<double>::vector({1, 2, 3}));
  auto fn = [&](Tape<double>& t) { return ops::l2_distance(t.param(p), t.constant(Tensor<double>({3}))); };
  GradCheckOptions options;
  options.analytic_perturbation = 0.1;
  EXPECT_FALSE(grad_check(fn, {&p}, options).passed());
}

TEST(GradCheck, SubsamplesLargeParameters) {
  std::mt19937_64 rng(15);
  Parameter<double> p("p", random_tensor({50}, rng));
  auto fn = [&](Tape<double>& t) { return ops::l2_distance(t.param(p), t.constant(Tensor<double>({50}))); };
  GradCheckOptions options;
  options.max_entries = 10;
  auto report = grad_check(fn, {&p}, options);
  EXPECT_EQ(report.entries_checked, 10u);
  EXPECT_TRUE(report.passed());
}

TEST(Ops, EveryDifferentiableOpPassesGradCheck) {
  std::mt19937_64 rng(16);
  Parameter<double> x("x", random_tensor({8, 6}, rng));
  Parameter<double> v("v", random_tensor({3}, rng));
  Parameter<double> w("w", random_tensor({9, 4}, rng));
  Parameter<double> b("b", random_tensor({4}, rng));
  Parameter<double> target("t", random_tensor({8, 2}, rng));
  auto fn = [&](Tape<double>& t) {
    auto fused = ops::concat_broadcast(t.param(x), t.param(v));        // 8 x 9
    auto h = ops::relu(ops::linear(fused, t.param(w), t.param(b)));     // 8 x 4
    h = ops::add(h, ops::scale(h, 0.5));
    auto shuffled = ops::pixel_shuffle_1d(h, 2);                        // 16 x 2
    auto pooled = ops::avg_pool_1d(shuffled, 2);                        // 8 x 2
    auto dist = ops::l2_distance(pooled, t.constant(target.value));
    auto m = ops::mean_frames(h);                                       // 4
    auto xent = ops::softmax_cross_entropy(m, 1);
    return ops::sum(std::vector{dist, xent});
  };
  auto report = grad_check(fn, {&x, &v, &w, &b});
  EXPECT_TRUE(report.passed()) << report.worst_parameter << " " << report.max_relative_error;
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Parameter<float> p("p", Tensor<float>::vector({1.0f, -2.0f}));
  Adam<float> adam({&p}, {});
  adam.step();
  EXPECT_EQ(p.value.values(), (AlignedVector<float>{1.0f, -2.0f}));
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, FirstStepMagnitudeIsLearningRate) {
  Parameter<float> p("p", Tensor<float>::scalar(0.25f));
  Adam<float> adam({&p}, {.learning_rate = 5e-4});
  p.grad[0] = 1.0f;
  adam.step();
  EXPECT_NEAR(0.25f - p.value[0], 5e-4, 1e-7);
  EXPECT_EQ(p.grad[0], 1.0f);
}

TEST(Adam, NonFiniteGradientAbortsAndNamesParameter) {
  Parameter<float> a("decoder.conv0.weight", Tensor<float>::scalar(1.0f));
  Parameter<float> b("ok", Tensor<float>::scalar(1.0f));
  Adam<float> adam({&b, &a}, {});
  b.grad[0] = 1.0f;
  a.grad[0] = std::nanf("");
  try {
    adam.step();
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("decoder.conv0.weight"), std::string::npos);
  }
  EXPECT_EQ(b.value[0], 1.0f);
  EXPECT_EQ(adam.steps(), 0u);
}

TEST(Adam, RejectsNonPositiveLearningRate) {
  Parameter<float> p("p", Tensor<float>::scalar(0));
  EXPECT_THROW(Adam<float>({&p}, {.learning_rate = 0.0}), ArgumentError);
}

TEST(Adam, DeterministicTrajectories) {
  auto run = [] {
    std::mt19937_64 rng(99);
    Parameter<float> w("w", fan_in_uniform<float>({4, 3}, 4, rng));
    Parameter<float> b("b", Tensor<float>({3}));
    Tensor<float> x({5, 4});
    for (auto& v : x.values()) v = static_cast<float>(normal(rng));
    Adam<float> adam({&w, &b}, {});
    for (int step = 0; step < 10; ++step) {
      adam.zero_grad();
      Tape<float> tape;
      auto y = ops::linear(tape.constant(x), tape.param(w), tape.param(b));
      tape.backward(ops::l2_distance(y, tape.constant(Tensor<float>({5, 3}, 1.0f))));
      adam.step();
    }
    return std::pair{w.value, b.value};
  };
  EXPECT_EQ(run(), run());
}

TEST(Tape, BackwardRequiresScalarRoot) {
  Tape<double> tape;
  auto x = tape.input(Tensor<double>::vector({1, 2}));
  EXPECT_THROW(tape.backward(x), ShapeError);
}

}  // namespace
}  // namespace lrvc
