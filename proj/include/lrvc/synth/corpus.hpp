// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrvc/audio/resample.hpp"
#include "lrvc/audio/wav.hpp"
#include "lrvc/synth/script.hpp"
#include "lrvc/synth/speaker.hpp"
#include "lrvc/synth/synthesize.hpp"

namespace lrvc::synth {

enum class Split { Train, Validation, Test };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw DataError("unknown split '" + s + "'");
}

/// Speaker-disjoint split: the last max(1, K/8) ids are test, the
/// max(1, K/8) before them validation (none when K = 2), the rest train.
inline Split split_of(int speaker_id, int num_speakers) {
  const int n_test = std::max(1, num_speakers / 8);
  const int n_val = num_speakers > 2 ? std::max(1, num_speakers / 8) : 0;
  if (speaker_id >= num_speakers - n_test) return Split::Test;
  if (speaker_id >= num_speakers - n_test - n_val) return Split::Validation;
  return Split::Train;
}

/// Inverse of UtteranceScript::to_string using the built-in vowel table.
inline UtteranceScript parse_script(const std::string& text) {
  UtteranceScript script;
  std::istringstream is(text);
  std::string item;
  while (is >> item) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DataError("malformed script token '" + item + "'");
    Token t;
    t.symbol = item.substr(0, colon);
    try {
      t.duration_ms = std::stod(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw DataError("malformed script token '" + item + "'");
    }
    if (!t.silent()) {
      auto it = std::find_if(kVowels.begin(), kVowels.end(), [&](const Vowel& v) { return t.symbol == v.symbol; });
      if (it == kVowels.end()) throw DataError("unknown script symbol '" + t.symbol + "'");
      t.f1 = it->f1, t.f2 = it->f2, t.f3 = it->f3;
    }
    script.tokens.push_back(t);
  }
  return script;
}

struct CorpusEntry {
  std::string id;
  int speaker_id = 0;
  int utterance = 0;
  Split split = Split::Train;
  double seconds = 0;
  std::string wav48, wav24, wav16;  // relative to the corpus root
  std::string script;
};

struct Corpus {
  std::filesystem::path root;
  int num_speakers = 0;
  std::vector<SpeakerProfile> speakers;
  std::vector<CorpusEntry> entries;

  std::filesystem::path path(const std::string& relative) const { return root / relative; }

  std::vector<int> speakers_in(Split s) const {
    std::vector<int> ids;
    for (int k = 0; k < num_speakers; ++k)
      if (split_of(k, num_speakers) == s) ids.push_back(k);
    return ids;
  }
  std::vector<const CorpusEntry*> entries_of(int speaker_id) const {
    std::vector<const CorpusEntry*> out;
    for (const auto& e : entries)
      if (e.speaker_id == speaker_id) out.push_back(&e);
    return out;
  }
  std::vector<const CorpusEntry*> entries_in(Split s) const {
    std::vector<const CorpusEntry*> out;
    for (const auto& e : entries)
      if (e.split == s) out.push_back(&e);
    return out;
  }
};

struct CorpusConfig {
  int num_speakers = 8;
  int utterances_per_speaker = 20;
  std::uint64_t seed = 0;
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

inline nlohmann::ordered_json speaker_json(const SpeakerProfile& p) {
  nlohmann::ordered_json j;
  j["speaker_id"] = p.speaker_id;
  j["base_f0"] = p.base_f0;
  j["f0_jitter"] = p.f0_jitter;
  j["formant_shift"] = p.formant_shift;
  j["spectral_tilt"] = p.spectral_tilt;
  return j;
}

}  // namespace detail

inline std::string manifest_line(const CorpusEntry& e, double base_f0) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["speaker_id"] = e.speaker_id;
  j["utterance"] = e.utterance;
  j["split"] = split_name(e.split);
  j["seconds"] = e.seconds;
  j["base_f0"] = base_f0;
  j["wav48"] = e.wav48;
  j["wav24"] = e.wav24;
  j["wav16"] = e.wav16;
  j["script"] = e.script;
  return j.dump();
}

/// Synthesizes the corpus under `root`: wav48/, wav24/, wav16/,
/// manifest.jsonl (one row per utterance) and speakers.jsonl.
inline Corpus build_corpus(const std::filesystem::path& root, const CorpusConfig& config) {
  if (config.num_speakers < 2) throw ArgumentError("build_corpus: num_speakers must be >= 2");
  if (config.utterances_per_speaker < 1) throw ArgumentError("build_corpus: utterances_per_speaker must be >= 1");
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"wav48", "wav24", "wav16"}) {
    fs::create_directories(root / sub, ec);
    if (ec) throw IoError("cannot create '" + (root / sub).string() + "': " + ec.message());
  }

  Corpus corpus;
  corpus.root = root;
  corpus.num_speakers = config.num_speakers;
  corpus.speakers = generate_speakers(config.num_speakers, config.seed);

  std::string manifest, speakers;
  for (const auto& p : corpus.speakers) {
    speakers += detail::speaker_json(p).dump() + "\n";
    for (int u = 0; u < config.utterances_per_speaker; ++u) {
      const std::uint64_t useed = mix_seed(config.seed, 0x10000ULL + static_cast<std::uint64_t>(p.speaker_id) * 4096 + u);
      const UtteranceScript script = generate_script(useed);
      const AudioSegment a48 = synthesize_utterance(p, script, useed);

      char name[32];
      std::snprintf(name, sizeof name, "spk%02d_utt%03d", p.speaker_id, u);
      CorpusEntry e;
      e.id = name;
      e.speaker_id = p.speaker_id;
      e.utterance = u;
      e.split = split_of(p.speaker_id, config.num_speakers);
      e.seconds = a48.duration();
      e.wav48 = "wav48/" + e.id + ".wav";
      e.wav24 = "wav24/" + e.id + ".wav";
      e.wav16 = "wav16/" + e.id + ".wav";
      e.script = script.to_string();
      save_wav(a48, root / e.wav48);
      save_wav(decimate(a48, 2), root / e.wav24);
      save_wav(decimate(a48, 3), root / e.wav16);
      manifest += manifest_line(e, p.base_f0) + "\n";
      corpus.entries.push_back(std::move(e));
    }
  }
  detail::write_text_file(root / "manifest.jsonl", manifest);
  detail::write_text_file(root / "speakers.jsonl", speakers);
  return corpus;
}

inline Corpus build_corpus(const std::filesystem::path& root, int num_speakers, int utterances_per_speaker,
                           std::uint64_t seed) {
  return build_corpus(root, CorpusConfig{num_speakers, utterances_per_speaker, seed});
}

/// Reads manifest.jsonl and speakers.jsonl written by build_corpus.
inline Corpus load_corpus(const std::filesystem::path& root) {
  auto read_lines = [](const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw IoError("cannot open '" + p.string() + "'");
    std::vector<nlohmann::json> rows;
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
      ++n;
      if (line.empty()) continue;
      try {
        rows.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw DataError(p.string() + ":" + std::to_string(n) + ": " + e.what());
      }
    }
    return rows;
  };
  Corpus corpus;
  corpus.root = root;
  try {
    for (const auto& j : read_lines(root / "speakers.jsonl")) {
      SpeakerProfile p;
      p.speaker_id = j.at("speaker_id").get<int>();
      p.base_f0 = j.at("base_f0").get<double>();
      p.f0_jitter = j.at("f0_jitter").get<double>();
      p.formant_shift = j.at("formant_shift").get<double>();
      p.spectral_tilt = j.at("spectral_tilt").get<double>();
      corpus.speakers.push_back(p);
    }
    corpus.num_speakers = static_cast<int>(corpus.speakers.size());
    for (const auto& j : read_lines(root / "manifest.jsonl")) {
      CorpusEntry e;
      e.id = j.at("id").get<std::string>();
      e.speaker_id = j.at("speaker_id").get<int>();
      e.utterance = j.at("utterance").get<int>();
      e.split = parse_split(j.at("split").get<std::string>());
      e.seconds = j.at("seconds").get<double>();
      e.wav48 = j.at("wav48").get<std::string>();
      e.wav24 = j.at("wav24").get<std::string>();
      e.wav16 = j.at("wav16").get<std::string>();
      e.script = j.at("script").get<std::string>();
      if (e.speaker_id < 0 || e.speaker_id >= corpus.num_speakers)
        throw DataError("manifest row '" + e.id + "' has speaker_id " + std::to_string(e.speaker_id) +
                        " outside 0.." + std::to_string(corpus.num_speakers - 1));
      corpus.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corpus at '" + root.string() + "': " + e.what());
  }
  if (corpus.num_speakers < 2) throw DataError("corpus at '" + root.string() + "' has fewer than 2 speakers");
  return corpus;
}

}  // namespace lrvc::synth
