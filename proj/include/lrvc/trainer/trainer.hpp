// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrvc/compute/adam.hpp"
#include "lrvc/losses/losses.hpp"
#include "lrvc/synth/corpus.hpp"
#include "lrvc/trainer/checkpoint.hpp"
#include "lrvc/trainer/config.hpp"
#include "lrvc/trainer/features.hpp"

namespace lrvc {

/// Averages the batch objective and accumulates its gradient into the
/// model parameters (each example is back-propagated with weight 1/B).
template <class T>
LossBreakdown accumulate_batch(const Model<T>& model, const std::vector<PairExample<T>>& batch, LossMode mode,
                               const LossWeights& w) {
  if (batch.empty()) throw ArgumentError("train_step: empty batch");
  LossBreakdown mean;
  mean.weights = w;
  const T seed = T(1) / static_cast<T>(batch.size());
  for (const auto& ex : batch) {
    Tape<T> tape;
    auto obj = sample_objective(tape, model, ex, mode, w);
    if (!std::isfinite(obj.values.total)) {
      LossBreakdown bad = obj.values;
      throw TrainingError("non-finite loss: " + breakdown_json(bad).dump());
    }
    tape.backward(obj.total, seed);
    mean += obj.values;
  }
  mean *= 1.0 / static_cast<double>(batch.size());
  return mean;
}

/// One optimizer update: forward, backward, Adam step, gradients cleared.
inline LossBreakdown train_step(Model<float>& model, Adam<float>& adam, const std::vector<PairExample<float>>& batch,
                                LossMode mode, const LossWeights& w) {
  adam.zero_grad();
  const LossBreakdown b = accumulate_batch(model, batch, mode, w);
  adam.step();
  adam.zero_grad();
  return b;
}

struct TrainResult {
  std::uint64_t final_step = 0;
  std::uint64_t best_step = 0;
  double best_validation = std::numeric_limits<double>::infinity();
  double final_validation = std::numeric_limits<double>::infinity();
  LossBreakdown last;
};

/// Training run writing into `out_dir`:
///   loss_log.jsonl    one record per step
///   validation.jsonl  one record per validation
///   best.rvck / final.rvck
class Trainer {
 public:
  using Progress = std::function<void(std::uint64_t step, const LossBreakdown&)>;

  Trainer(TrainConfig config, std::filesystem::path out_dir)
      : config_(std::move(config)), out_(std::move(out_dir)), encoder_(config_.content) {
    if (config_.corpus.empty()) throw ArgumentError("config: 'corpus' is required");
    corpus_ = synth::load_corpus(config_.corpus);
    train_ids_ = corpus_.speakers_in(synth::Split::Train);
    const auto val_ids = corpus_.speakers_in(synth::Split::Validation);
    if (train_ids_.size() < 2) throw DataError("corpus needs at least 2 training speakers");
    if (val_ids.empty()) throw DataError("corpus has no validation speakers (need >= 3 speakers)");
    config_.model.num_speakers = train_ids_.size();
    config_.validate();
    segment48_ = config_.segment_samples(48000);

    std::vector<DualRateUtterance> train, val;
    for (const auto& e : corpus_.entries) {
      if (e.split == synth::Split::Train) {
        train.push_back(load_dual_rate(corpus_, e));
        train_labels_.push_back(label_of(e.speaker_id));
      } else if (e.split == synth::Split::Validation) {
        val.push_back(load_dual_rate(corpus_, e));
      }
    }
    train_bank_.emplace(std::move(train), encoder_, segment48_, config_.crop_grid_ms > 0);
    val_bank_.emplace(std::move(val), encoder_, segment48_, true);
  }

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  const TrainConfig& config() const noexcept { return config_; }
  const synth::Corpus& corpus() const noexcept { return corpus_; }
  const ContentEncoder& content_encoder() const noexcept { return encoder_; }
  const std::vector<int>& train_speakers() const noexcept { return train_ids_; }

  /// Master-sample quantum of crop offsets.
  std::size_t offset_quantum() const {
    return config_.crop_grid_ms > 0 ? static_cast<std::size_t>(std::llround(config_.crop_grid_ms * 48.0)) : 6;
  }

  /// Batch for `step`, a pure function of (seed, step).
  std::vector<PairExample<float>> batch(std::uint64_t step) {
    std::mt19937_64 rng(mix_seed(config_.seed, step));
    std::vector<PairExample<float>> out;
    for (std::size_t b = 0; b < config_.batch_size; ++b) {
      const std::size_t i = static_cast<std::size_t>(rng() % train_bank_->size());
      const auto& utt = train_bank_->utterance(i);
      PairOffsets o = sample_offsets(utt.length48(), segment48_, rng, offset_quantum(), utt.id);
      if (config_.mode == LossMode::SelfSame) o.v = o.u;
      PairExample<float> ex;
      ex.speaker = train_labels_[i];
      {
        const auto& f = train_bank_->get(i, o.u);
        ex.content_u = f.content;
        ex.mel_u = f.mel;
      }
      if (config_.mode == LossMode::SelfSame) {
        ex.content_v = ex.content_u;
        ex.mel_v = ex.mel_u;
      } else {
        const auto& f = train_bank_->get(i, o.v);
        ex.content_v = f.content;
        ex.mel_v = f.mel;
      }
      out.push_back(std::move(ex));
    }
    return out;
  }

  /// Mean self-reconstruction loss over the validation speakers' first crops.
  double validate(const Model<float>& model) {
    double total = 0;
    for (std::size_t i = 0; i < val_bank_->size(); ++i) {
      const auto& f = val_bank_->get(i, 0);
      Tape<float> tape(false);
      const auto s = model.encode_speaker(tape, tape.constant(f.mel));
      total += loss_self_same(tape.constant(f.mel), model.decode(tape, tape.constant(f.content), s)).value()[0];
    }
    return total / static_cast<double>(val_bank_->size());
  }

  nlohmann::json metadata() const {
    nlohmann::json m;
    m["content_encoder"] = content_config_json(config_.content);
    m["train"] = train_config_json(config_);
    m["train_speakers"] = train_ids_;
    return m;
  }

  TrainResult run(const std::optional<std::filesystem::path>& resume = std::nullopt, bool force = false,
                  const Progress& progress = nullptr) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw IoError("cannot create output directory '" + out_.string() + "': " + ec.message());

    Model<float> model(config_.model);
    Adam<float> adam(model.parameters(), AdamConfig{config_.learning_rate});
    TrainResult result;
    std::uint64_t start = 0;
    if (resume) {
      const Checkpoint c = load_checkpoint(*resume);
      require_compatible(c, config_.model, force);
      restore_model(c, model);
      restore_optimizer(c, adam);
      start = c.step;
      if (start >= config_.steps)
        throw ArgumentError("resume: checkpoint is at step " + std::to_string(start) + ", nothing left of " +
                            std::to_string(config_.steps) + " steps");
      truncate_log(out_ / "loss_log.jsonl", start);
      for (const auto& row : truncate_log(out_ / "validation.jsonl", start)) {
        const double v = row.at("validation_self_same").get<double>();
        if (v < result.best_validation) {
          result.best_validation = v;
          result.best_step = row.at("step").get<std::uint64_t>();
        }
      }
    } else {
      for (const char* f : {"loss_log.jsonl", "validation.jsonl"}) fs::remove(out_ / f, ec);
    }

    std::ofstream log(out_ / "loss_log.jsonl", std::ios::app);
    std::ofstream vlog(out_ / "validation.jsonl", std::ios::app);
    if (!log || !vlog) throw IoError("cannot open logs in '" + out_.string() + "'");

    for (std::uint64_t step = start + 1; step <= config_.steps; ++step) {
      LossBreakdown b;
      try {
        b = train_step(model, adam, batch(step), config_.mode, config_.weights);
      } catch (const TrainingError& e) {
        throw TrainingError("step " + std::to_string(step) + ": " + e.what());
      }
      nlohmann::ordered_json row{{"step", step}, {"mode", mode_name(config_.mode)}};
      const auto values = breakdown_json(b);
      for (const auto& [k, v] : values.items()) row[k] = v;
      log << row.dump() << '\n';
      result.last = b;
      if (progress) progress(step, b);

      if (step % config_.validation_interval == 0 || step == config_.steps) {
        const double v = validate(model);
        vlog << nlohmann::ordered_json{{"step", step}, {"validation_self_same", v}}.dump() << '\n';
        vlog.flush();
        log.flush();
        result.final_validation = v;
        if (v < result.best_validation) {
          result.best_validation = v;
          result.best_step = step;
          save_checkpoint(capture_checkpoint(model, &adam, step, metadata()), out_ / "best.rvck");
        }
      }
    }
    save_checkpoint(capture_checkpoint(model, &adam, config_.steps, metadata()), out_ / "final.rvck");
    result.final_step = config_.steps;
    if (!log || !vlog) throw IoError("write failed for logs in '" + out_.string() + "'");
    return result;
  }

 private:
  std::size_t label_of(int speaker_id) const {
    for (std::size_t k = 0; k < train_ids_.size(); ++k)
      if (train_ids_[k] == speaker_id) return k;
    throw DataError("speaker " + std::to_string(speaker_id) + " is not a training speaker");
  }

  /// Keeps the records with step <= `last` and returns them.
  static std::vector<nlohmann::json> truncate_log(const std::filesystem::path& path, std::uint64_t last) {
    std::vector<nlohmann::json> kept;
    std::string text;
    {
      std::ifstream is(path);
      if (!is) return kept;
      std::string line;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto row = nlohmann::json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.contains("step")) throw DataError("malformed log line in '" + path.string() + "'");
        if (row["step"].get<std::uint64_t>() > last) continue;
        text += line + "\n";
        kept.push_back(std::move(row));
      }
    }
    std::ofstream os(path, std::ios::trunc);
    os << text;
    if (!os) throw IoError("cannot rewrite '" + path.string() + "'");
    return kept;
  }

  TrainConfig config_;
  std::filesystem::path out_;
  ContentEncoder encoder_;
  synth::Corpus corpus_;
  std::vector<int> train_ids_;
  std::vector<std::size_t> train_labels_;
  std::size_t segment48_ = 0;
  std::optional<FeatureBank> train_bank_, val_bank_;
};

}  // namespace lrvc
