// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrvc/eval/metrics.hpp"
#include "lrvc/synth/corpus.hpp"
#include "lrvc/trainer/features.hpp"

namespace lrvc {

struct EvalOptions {
  std::size_t pairs = 50;
  std::uint64_t seed = 0;
  /// Speakers to draw pairs from; empty means every held-out speaker.
  std::vector<int> speakers;
  double segment_seconds = 2.0;
  /// Also convert each source onto itself to measure the round-trip floor.
  bool round_trip_floor = true;
  /// Embedding variance over all corpus speakers (true) or the pair speakers.
  bool variance_all_speakers = true;
  /// When set, converted WAVs are written here.
  std::optional<std::filesystem::path> audio_dir;
  GriffinLimConfig vocoder;
};

struct PairMetrics {
  std::string source_id, target_id;
  int source_speaker = 0, target_speaker = 0;
  double source_f0 = 0, target_f0 = 0;
  std::optional<double> converted_f0;
  bool f0_transferred = false;
  double similarity_to_target = 0;
  double similarity_to_source = 0;
  double content_distance = 0;
  std::optional<double> round_trip_distance;
};

struct MetricReport {
  std::uint64_t checkpoint_step = 0;
  std::vector<int> train_speakers;
  std::vector<int> eval_speakers;
  std::vector<PairMetrics> rows;

  double speaker_similarity = 0;       // mean cosine(converted, target)
  double mismatched_similarity = 0;    // mean cosine(converted, source)
  double f0_transfer_rate = 0;
  double content_distance = 0;
  std::optional<double> round_trip_floor;
  VarianceReport variance;
};

namespace detail {

inline std::vector<int> held_out_speakers(const synth::Corpus& corpus) {
  std::vector<int> ids = corpus.speakers_in(synth::Split::Validation);
  for (int k : corpus.speakers_in(synth::Split::Test)) ids.push_back(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline double mean_of(const std::vector<PairMetrics>& rows, double PairMetrics::*field) {
  double s = 0;
  for (const auto& r : rows) s += r.*field;
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

}  // namespace detail

/// Zero-shot evaluation: converts source utterances of one held-out speaker
/// to the voice of another held-out speaker and scores the results.
inline MetricReport evaluate(const Checkpoint& ckpt, const synth::Corpus& corpus, const EvalOptions& opt = {}) {
  if (opt.pairs == 0) throw ArgumentError("evaluate: need at least one pair");
  MetricReport report;
  report.checkpoint_step = ckpt.step;
  const auto train = corpus.speakers_in(synth::Split::Train);
  report.train_speakers = train;
  report.eval_speakers = opt.speakers.empty() ? detail::held_out_speakers(corpus) : opt.speakers;
  std::sort(report.eval_speakers.begin(), report.eval_speakers.end());
  for (int k : report.eval_speakers) {
    if (k < 0 || k >= corpus.num_speakers) throw ArgumentError("evaluate: speaker " + std::to_string(k) + " is not in the corpus");
    if (std::find(train.begin(), train.end(), k) != train.end())
      throw ArgumentError("evaluate: speaker " + std::to_string(k) +
                          " belongs to the training split; zero-shot evaluation uses unseen speakers only");
  }
  if (report.eval_speakers.size() < 2) throw ArgumentError("evaluate: need at least 2 unseen speakers");

  Converter conv(ckpt, opt.vocoder);
  const auto segment48 = static_cast<std::size_t>(std::llround(opt.segment_seconds * 48000));

  // Every ordered (source utterance, target utterance) across distinct speakers.
  std::vector<std::pair<const synth::CorpusEntry*, const synth::CorpusEntry*>> candidates;
  for (int a : report.eval_speakers)
    for (int b : report.eval_speakers) {
      if (a == b) continue;
      for (const auto* src : corpus.entries_of(a))
        for (const auto* tgt : corpus.entries_of(b)) candidates.emplace_back(src, tgt);
    }
  std::mt19937_64 rng(mix_seed(opt.seed, 0xe7));
  std::shuffle(candidates.begin(), candidates.end(), rng);
  if (candidates.size() > opt.pairs) candidates.resize(opt.pairs);

  std::map<std::string, DualRateSegment> crops;
  auto crop_of = [&](const synth::CorpusEntry* e) -> const DualRateSegment& {
    auto it = crops.find(e->id);
    if (it == crops.end()) it = crops.emplace(e->id, crop(load_dual_rate(corpus, *e), 0, segment48)).first;
    return it->second;
  };
  if (opt.audio_dir) std::filesystem::create_directories(*opt.audio_dir);

  for (const auto& [src, tgt] : candidates) {
    const DualRateSegment& s = crop_of(src);
    const DualRateSegment& t = crop_of(tgt);
    PairMetrics m;
    m.source_id = src->id;
    m.target_id = tgt->id;
    m.source_speaker = src->speaker_id;
    m.target_speaker = tgt->speaker_id;
    m.source_f0 = corpus.speakers.at(static_cast<std::size_t>(src->speaker_id)).base_f0;
    m.target_f0 = corpus.speakers.at(static_cast<std::size_t>(tgt->speaker_id)).base_f0;

    const Tensor<float> s_target = conv.speaker_embedding(t.a24);
    const Tensor<float> s_source = conv.speaker_embedding(s.a24);
    const ConversionResult r = conv.convert_with_embedding(s.a24, s_target);
    const Tensor<float> s_conv = conv.speaker_embedding(r.mel);
    m.similarity_to_target = cosine(s_conv, s_target);
    m.similarity_to_source = cosine(s_conv, s_source);
    m.converted_f0 = estimate_f0(r.audio);
    m.f0_transferred = f0_transferred(m.converted_f0, m.source_f0, m.target_f0);
    m.content_distance = content_distance(conv.content_encoder(), s.a24, r.audio);
    if (opt.round_trip_floor) {
      const ConversionResult self = conv.convert_with_embedding(s.a24, s_source);
      m.round_trip_distance = content_distance(conv.content_encoder(), s.a24, self.audio);
    }
    if (opt.audio_dir) save_wav(r.audio, *opt.audio_dir / (m.source_id + "__to__" + m.target_id + ".wav"));
    report.rows.push_back(std::move(m));
  }

  report.speaker_similarity = detail::mean_of(report.rows, &PairMetrics::similarity_to_target);
  report.mismatched_similarity = detail::mean_of(report.rows, &PairMetrics::similarity_to_source);
  report.content_distance = detail::mean_of(report.rows, &PairMetrics::content_distance);
  std::size_t moved = 0;
  for (const auto& r : report.rows) moved += r.f0_transferred;
  report.f0_transfer_rate = static_cast<double>(moved) / static_cast<double>(report.rows.size());
  if (opt.round_trip_floor) {
    double s = 0;
    for (const auto& r : report.rows) s += *r.round_trip_distance;
    report.round_trip_floor = s / static_cast<double>(report.rows.size());
  }

  std::map<int, std::vector<Tensor<float>>> embeddings;
  for (const auto& e : corpus.entries) {
    const bool in_pairs = std::binary_search(report.eval_speakers.begin(), report.eval_speakers.end(), e.speaker_id);
    if (!opt.variance_all_speakers && !in_pairs) continue;
    embeddings[e.speaker_id].push_back(conv.speaker_embedding(crop_of(&e).a24));
  }
  report.variance = embedding_variance(embeddings);
  return report;
}

inline nlohmann::ordered_json report_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["protocol"] = "zero-shot";
  j["eval_speakers"] = r.eval_speakers;
  j["train_speakers"] = r.train_speakers;
  j["checkpoint_step"] = r.checkpoint_step;
  j["pairs"] = r.rows.size();
  j["speaker_similarity"] = r.speaker_similarity;
  j["mismatched_similarity"] = r.mismatched_similarity;
  j["f0_transfer_rate"] = r.f0_transfer_rate;
  j["content_distance"] = r.content_distance;
  j["round_trip_floor"] = r.round_trip_floor ? nlohmann::ordered_json(*r.round_trip_floor) : nlohmann::ordered_json();
  j["intra_var"] = r.variance.intra;
  j["inter_var"] = r.variance.inter;
  j["var_ratio"] = r.variance.ratio;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& m : r.rows) {
    nlohmann::ordered_json row;
    row["source"] = m.source_id;
    row["target"] = m.target_id;
    row["source_speaker"] = m.source_speaker;
    row["target_speaker"] = m.target_speaker;
    row["source_f0"] = m.source_f0;
    row["target_f0"] = m.target_f0;
    row["converted_f0"] = m.converted_f0 ? nlohmann::ordered_json(*m.converted_f0) : nlohmann::ordered_json();
    row["f0_transferred"] = m.f0_transferred;
    row["similarity_to_target"] = m.similarity_to_target;
    row["similarity_to_source"] = m.similarity_to_source;
    row["content_distance"] = m.content_distance;
    row["round_trip_distance"] =
        m.round_trip_distance ? nlohmann::ordered_json(*m.round_trip_distance) : nlohmann::ordered_json();
    rows.push_back(std::move(row));
  }
  return j;
}

inline std::string summary_table(const MetricReport& r) {
  std::ostringstream os;
  char line[128];
  auto put = [&](const char* name, double v) {
    std::snprintf(line, sizeof line, "  %-24s %10.4f\n", name, v);
    os << line;
  };
  os << "zero-shot evaluation, " << r.rows.size() << " pairs over unseen speakers";
  for (int k : r.eval_speakers) os << ' ' << k;
  os << "\n";
  put("speaker_similarity", r.speaker_similarity);
  put("mismatched_similarity", r.mismatched_similarity);
  put("f0_transfer_rate", r.f0_transfer_rate);
  put("content_distance", r.content_distance);
  if (r.round_trip_floor) put("round_trip_floor", *r.round_trip_floor);
  put("intra_var", r.variance.intra);
  put("inter_var", r.variance.inter);
  put("var_ratio", r.variance.ratio);
  os << "  (cosines use the model's own speaker encoder; content distance uses the frozen content encoder)\n";
  return os.str();
}

}  // namespace lrvc
