// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lrvc/audio.hpp"
#include "lrvc/synth.hpp"

namespace lrvc::synth {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lrvc_synth_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// 10 ms frame levels in dB relative to the loudest frame.
std::vector<double> frame_db(const AudioSegment& a) {
  const std::size_t hop = static_cast<std::size_t>(a.sample_rate / 100);
  std::vector<double> db;
  double peak = 0;
  for (std::size_t s = 0; s + hop <= a.size(); s += hop) {
    double e = 0;
    for (std::size_t n = s; n < s + hop; ++n) e += static_cast<double>(a.samples[n]) * a.samples[n];
    db.push_back(e / static_cast<double>(hop));
    peak = std::max(peak, db.back());
  }
  for (double& v : db) v = 10 * std::log10(std::max(v / peak, 1e-12));
  return db;
}

// Number of loud runs separated by dips of at least 20 dB.
int count_segments(const AudioSegment& a) {
  int runs = 0;
  bool loud = false;
  for (double v : frame_db(a)) {
    const bool now = v > -20.0;
    runs += now && !loud;
    loud = now;
  }
  return runs;
}

UtteranceScript fixed_script() {
  return parse_script("a:300 sil:150 i:300 sil:150 u:300 sil:150 o:300 sil:150 e:400");
}

TEST(Speaker, SameSeedSameProfile) { EXPECT_EQ(generate_speaker(42), generate_speaker(42)); }

TEST(Speaker, RangesHoldAcrossSeeds) {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto p = generate_speaker(s);
    EXPECT_GE(p.base_f0, 80.0);
    EXPECT_LE(p.base_f0, 300.0);
    EXPECT_GE(p.formant_shift, 0.8);
    EXPECT_LE(p.formant_shift, 1.25);
    EXPECT_GE(p.spectral_tilt, -12.0);
    EXPECT_LE(p.spectral_tilt, -3.0);
  }
}

TEST(Speaker, EightProfilesAreSeparatedInF0) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ps = generate_speakers(8, seed);
    ASSERT_EQ(ps.size(), 8u);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      EXPECT_EQ(ps[i].speaker_id, static_cast<int>(i));
      for (std::size_t j = i + 1; j < ps.size(); ++j)
        EXPECT_GE(std::abs(ps[i].base_f0 - ps[j].base_f0), 15.0) << "seed " << seed;
    }
  }
}

TEST(Speaker, ImpossiblePackingIsRejected) { EXPECT_THROW(generate_speakers(40, 1), ArgumentError); }

TEST(Script, MeetsLengthAndTokenRules) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto sc = generate_script(s);
    EXPECT_GE(sc.tokens.size(), 8u);
    EXPECT_GE(sc.duration_seconds(), 2.5);
    EXPECT_FALSE(sc.tokens.front().silent());
    EXPECT_FALSE(sc.tokens.back().silent());
    for (const auto& t : sc.tokens) EXPECT_GT(t.duration_ms, 0.0);
  }
}

TEST(Script, TextRoundTrip) {
  const auto sc = generate_script(9);
  EXPECT_EQ(parse_script(sc.to_string()), sc);
  EXPECT_THROW(parse_script("zz:100"), DataError);
  EXPECT_THROW(parse_script("a100"), DataError);
}

TEST(Synthesize, RecoversBaseF0WithinFivePercent) {
  const auto profiles = generate_speakers(8, 3);
  for (const auto& p : profiles) {
    const auto audio = synthesize_utterance(p, generate_script(p.speaker_id + 100), 7);
    ASSERT_EQ(audio.sample_rate, 48000);
    const auto f0 = estimate_f0(audio);
    ASSERT_TRUE(f0.has_value());
    EXPECT_NEAR(*f0, p.base_f0, 0.05 * p.base_f0) << "speaker " << p.speaker_id;
  }
}

TEST(Synthesize, Deterministic) {
  const auto p = generate_speaker(5);
  const auto sc = generate_script(5);
  EXPECT_EQ(synthesize_utterance(p, sc, 1).samples, synthesize_utterance(p, sc, 1).samples);
  EXPECT_NE(synthesize_utterance(p, sc, 1).samples, synthesize_utterance(p, sc, 2).samples);
}

TEST(Synthesize, SameScriptTwoSpeakersSameSegmentation) {
  const auto ps = generate_speakers(2, 11);
  const auto a = synthesize_utterance(ps[0], fixed_script(), 1);
  const auto b = synthesize_utterance(ps[1], fixed_script(), 1);
  EXPECT_GT(std::abs(*estimate_f0(a) - *estimate_f0(b)), 10.0);
  EXPECT_EQ(count_segments(a), 5);
  EXPECT_EQ(count_segments(b), 5);
}

TEST(Synthesize, SilenceTokenDipsByTwentyDb) {
  const auto p = generate_speaker(2);
  const auto a = synthesize_utterance(p, fixed_script(), 3);
  const auto db = frame_db(a);
  // First silence covers 300..450 ms; check its interior frames.
  for (int f = 33; f < 43; ++f) EXPECT_LT(db[static_cast<std::size_t>(f)], -20.0) << "frame " << f;
}

TEST(Synthesize, LengthMatchesScript) {
  const auto a = synthesize_utterance(generate_speaker(1), fixed_script(), 0);
  EXPECT_EQ(a.size(), static_cast<std::size_t>(fixed_script().duration_seconds() * 48000));
  float mx = 0;
  for (float v : a.samples) mx = std::max(mx, std::abs(v));
  EXPECT_LE(mx, 0.91f);
}

TEST(Split, EightSpeakersSixOneOne) {
  int n[3] = {0, 0, 0};
  for (int k = 0; k < 8; ++k) ++n[static_cast<int>(split_of(k, 8))];
  EXPECT_EQ(n[0], 6);
  EXPECT_EQ(n[1], 1);
  EXPECT_EQ(n[2], 1);
}

TEST(Corpus, BuildsSplitsAndRebuildsIdentically) {
  const auto root = scratch("corpus");
  const Corpus c = build_corpus(root, 3, 2, 17);
  EXPECT_EQ(c.entries.size(), 6u);
  const std::string first = slurp(root / "manifest.jsonl");
  int lines = 0;
  for (char ch : first) lines += ch == '\n';
  EXPECT_EQ(lines, 6);

  std::set<int> train, test;
  for (const auto& e : c.entries) {
    (e.split == Split::Train ? train : test).insert(e.speaker_id);
    EXPECT_GE(e.seconds, 2.5);
    EXPECT_EQ(load_wav(root / e.wav48).sample_rate, 48000);
    EXPECT_EQ(load_wav(root / e.wav24).sample_rate, 24000);
    EXPECT_EQ(load_wav(root / e.wav16).sample_rate, 16000);
  }
  for (int k : test) EXPECT_EQ(train.count(k), 0u);

  const Corpus loaded = load_corpus(root);
  EXPECT_EQ(loaded.speakers, c.speakers);
  ASSERT_EQ(loaded.entries.size(), c.entries.size());
  EXPECT_EQ(loaded.entries[3].script, c.entries[3].script);

  build_corpus(root, 3, 2, 17);
  EXPECT_EQ(slurp(root / "manifest.jsonl"), first);
  fs::remove_all(root);
}

TEST(Corpus, RejectsSingleSpeaker) { EXPECT_THROW(build_corpus(scratch("one"), 1, 2, 0), ArgumentError); }

TEST(Corpus, MissingManifestNamesPath) {
  const auto root = scratch("missing");
  try {
    load_corpus(root);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("speakers.jsonl"), std::string::npos);
  }
}

}  // namespace
}  // namespace lrvc::synth
