// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "lrvc/audio.hpp"
#include "lrvc/content.hpp"
#include "lrvc/synth.hpp"

namespace lrvc {
namespace {

namespace fs = std::filesystem;

AudioSegment utterance16k(int speaker_seed, std::uint64_t script_seed) {
  const auto p = synth::generate_speaker(static_cast<std::uint64_t>(speaker_seed));
  const auto a48 = synth::synthesize_utterance(p, synth::generate_script(script_seed), 1);
  return decimate(a48, 3).slice(0, 32000);
}

double mean_frame_distance(const Tensor<float>& a, const Tensor<float>& b) {
  double total = 0;
  for (std::size_t t = 0; t < a.dim(0); ++t) {
    double d = 0;
    for (std::size_t c = 0; c < a.dim(1); ++c) d += std::pow(a(t, c) - b(t, c), 2);
    total += std::sqrt(d);
  }
  return total / static_cast<double>(a.dim(0));
}

TEST(ContentEncoder, TwoSecondsGiveHundredFrames) {
  const ContentEncoder enc;
  const auto c = enc(utterance16k(1, 1));
  EXPECT_EQ(c.size(), 100u);
  EXPECT_EQ(c.dims(), 256u);
  EXPECT_DOUBLE_EQ(c.frame_rate, 50.0);
  EXPECT_TRUE(c.frames.all_finite());
}

TEST(ContentEncoder, StrideLawAcrossLengths) {
  const ContentEncoder enc;
  const auto a = utterance16k(2, 2);
  for (std::size_t n = 320; n <= 32000; n += 320 * 7) EXPECT_EQ(enc(a.slice(0, n)).size() * 320, n);
}

TEST(ContentEncoder, Deterministic) {
  const auto a = utterance16k(3, 3);
  EXPECT_EQ(ContentEncoder{}(a).frames, ContentEncoder{}(a).frames);
}

TEST(ContentEncoder, OutputIsStandardizedPerChannel) {
  const auto c = ContentEncoder{}(utterance16k(4, 4));
  for (std::size_t j = 0; j < c.dims(); j += 37) {
    double mean = 0, var = 0;
    for (std::size_t t = 0; t < c.size(); ++t) mean += c.frames(t, j);
    mean /= 100;
    for (std::size_t t = 0; t < c.size(); ++t) var += std::pow(c.frames(t, j) - mean, 2);
    EXPECT_NEAR(mean, 0.0, 1e-5);
    EXPECT_NEAR(var / 100, 1.0, 1e-3);
  }
}

TEST(ContentEncoder, DependsOnContent) {
  const ContentEncoder enc;
  const auto a = enc(utterance16k(5, 10)).frames;
  const auto b = enc(utterance16k(5, 11)).frames;
  EXPECT_NE(a, b);
  EXPECT_GT(mean_frame_distance(a, b), 1.0);
}

TEST(ContentEncoder, RejectsWrongRateAndLength) {
  const ContentEncoder enc;
  EXPECT_THROW(enc(AudioSegment{std::vector<float>(32000), 24000}), ArgumentError);
  EXPECT_THROW(enc(AudioSegment{std::vector<float>(32001), 16000}), ArgumentError);
  EXPECT_THROW(enc(AudioSegment{{}, 16000}), ArgumentError);
}

TEST(ContentFeatures, DumpLoadBitIdentical) {
  std::mt19937 rng(3);
  std::normal_distribution<float> n;
  Tensor<float> t({100, 256});
  for (auto& v : t.values()) v = n(rng);
  const fs::path p = fs::temp_directory_path() / "lrvc_content.rvf";
  save_content_features(ContentFrames{t}, p);
  EXPECT_EQ(load_content_features(p).frames, t);
  fs::remove(p);
}

TEST(ContentFeatures, WrongDimsNamed) {
  const fs::path p = fs::temp_directory_path() / "lrvc_content768.rvf";
  save_rvf(Tensor<float>({10, 768}), p);
  try {
    load_content_features(p);
    FAIL();
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("768"), std::string::npos);
    EXPECT_NE(msg.find("256"), std::string::npos);
  }
  fs::remove(p);
}

TEST(ContentFeatures, TruncatedPayload) {
  const fs::path p = fs::temp_directory_path() / "lrvc_content_trunc.rvf";
  save_rvf(Tensor<float>({10, 256}), p);
  fs::resize_file(p, fs::file_size(p) - 7);
  EXPECT_THROW(load_content_features(p), FormatError);
  fs::remove(p);
}

}  // namespace
}  // namespace lrvc
