// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0
//
// lrvc: corpus generation, training, conversion, evaluation and gradient
// self-tests. Exit status 0 on success, 1 on user or data errors, 2 when an
// internal invariant breaks.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lrvc/check/grad_suites.hpp"
#include "lrvc/core/allocator.hpp"
#include "lrvc/eval.hpp"
#include "lrvc/synth.hpp"
#include "lrvc/trainer.hpp"

namespace fs = std::filesystem;
using namespace lrvc;

namespace {

int gen_data(int speakers, int utterances, const fs::path& out, std::uint64_t seed) {
  const synth::Corpus c = synth::build_corpus(out, speakers, utterances, seed);
  std::printf("wrote %zu utterances from %d speakers to %s\n", c.entries.size(), c.num_speakers, out.c_str());
  for (auto split : {synth::Split::Train, synth::Split::Validation, synth::Split::Test}) {
    std::printf("  %-10s", synth::split_name(split));
    for (int k : c.speakers_in(split)) std::printf(" %d", k);
    std::printf("\n");
  }
  return 0;
}

int train(const fs::path& config_path, const fs::path& out, const std::optional<fs::path>& resume, bool force,
          std::uint64_t log_every) {
  Trainer trainer(load_train_config(config_path), out);
  const auto& cfg = trainer.config();
  std::fprintf(stderr, "training %s for %llu steps, batch %zu, %zu training speakers\n", mode_name(cfg.mode).c_str(),
               static_cast<unsigned long long>(cfg.steps), cfg.batch_size, trainer.train_speakers().size());
  auto progress = [&](std::uint64_t step, const LossBreakdown& b) {
    if (log_every && (step % log_every == 0 || step == cfg.steps))
      std::fprintf(stderr, "step %6llu  total %.4f\n", static_cast<unsigned long long>(step), b.total);
  };
  const TrainResult r = trainer.run(resume, force, progress);
  std::printf("final step %llu, validation %.6f; best step %llu, validation %.6f\n",
              static_cast<unsigned long long>(r.final_step), r.final_validation,
              static_cast<unsigned long long>(r.best_step), r.best_validation);
  return 0;
}

int convert(const fs::path& checkpoint, const fs::path& source, const fs::path& target, const fs::path& out,
            const std::optional<fs::path>& mel_out) {
  Converter conv = Converter::from_file(checkpoint);
  const AudioSegment src = load_wav(source);
  const AudioSegment tgt = load_wav(target);
  ConversionResult r = conv.convert(src, tgt);
  r.source_id = source.stem().string();
  r.target_id = target.stem().string();
  save_wav(r.audio, out);
  if (mel_out) save_rvf(r.mel.frames, *mel_out);
  std::printf("%s -> %s: %zu mel frames, %.3f s at %d Hz\n", r.source_id.c_str(), r.target_id.c_str(),
              r.mel.frames.dim(0), r.audio.duration(), r.audio.sample_rate);
  return 0;
}

int evaluate_cmd(const fs::path& checkpoint, const fs::path& corpus_dir, std::size_t pairs, std::uint64_t seed,
                 const fs::path& out, const std::vector<int>& speakers, const std::optional<fs::path>& audio_dir,
                 bool floor) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const synth::Corpus corpus = synth::load_corpus(corpus_dir);
  EvalOptions opt;
  opt.pairs = pairs;
  opt.seed = seed;
  opt.speakers = speakers;
  opt.audio_dir = audio_dir;
  opt.round_trip_floor = floor;
  const MetricReport report = evaluate(ckpt, corpus, opt);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream os(out);
  os << report_json(report).dump(2) << '\n';
  if (!os) throw IoError("cannot write report '" + out.string() + "'");
  std::fputs(summary_table(report).c_str(), stdout);
  return 0;
}

int grad_check_cmd(const std::string& scope, std::uint64_t seed, double corruption) {
  GradSuiteOptions opt;
  opt.seed = seed;
  opt.corruption = corruption;
  const auto checks = scope == "ops" ? op_grad_suite(opt) : model_grad_suite(opt);
  for (const auto& c : checks)
    std::printf("%-28s max_rel_err %.3e  entries %6zu  %s\n", c.name.c_str(), c.report.max_relative_error,
                c.report.entries_checked, c.report.passed() ? "ok" : "FAIL");
  const bool ok = all_passed(checks);
  std::printf("%s: %s at tolerance %.0e\n", scope.c_str(), ok ? "passed" : "failed", opt.tolerance);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  CLI::App app{"Zero-shot voice conversion with a length-resampling decoder"};
  app.require_subcommand(1);

  int speakers = 8, utterances = 20;
  std::uint64_t seed = 0;
  fs::path out, config, checkpoint, source, target, corpus;
  std::optional<fs::path> resume, mel_out, audio_dir;
  bool force = false, no_floor = false;
  std::uint64_t log_every = 100;
  std::size_t pairs = 50;
  std::vector<int> eval_speakers;
  std::string scope = "ops";
  double corruption = 0.0;

  auto* gen = app.add_subcommand("gen-data", "Synthesize the parametric-speaker corpus");
  gen->add_option("--speakers", speakers, "Number of speakers K (>= 2)")->capture_default_str();
  gen->add_option("--utterances", utterances, "Utterances per speaker N")->capture_default_str();
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--seed", seed, "Corpus seed")->capture_default_str();

  auto* tr = app.add_subcommand("train", "Train a model from a JSON config");
  tr->add_option("--config", config, "Training config (JSON)")->required()->check(CLI::ExistingFile);
  tr->add_option("--out", out, "Run directory for checkpoints and logs")->required();
  tr->add_option("--resume", resume, "Checkpoint to resume from");
  tr->add_flag("--force", force, "Resume even if the architecture hash differs");
  tr->add_option("--log-every", log_every, "Progress line interval in steps (0 = silent)")->capture_default_str();

  auto* cv = app.add_subcommand("convert", "Convert a source utterance to a target voice");
  cv->add_option("--checkpoint", checkpoint, "Trained checkpoint")->required();
  cv->add_option("--source", source, "Source WAV (content)")->required();
  cv->add_option("--target", target, "Target WAV (voice)")->required();
  cv->add_option("--out", out, "Converted WAV, 24 kHz")->required();
  cv->add_option("--mel-out", mel_out, "Also write the converted mel frames (RVF1)");

  auto* ev = app.add_subcommand("evaluate", "Score zero-shot conversions between unseen speakers");
  ev->add_option("--checkpoint", checkpoint, "Trained checkpoint")->required();
  ev->add_option("--corpus", corpus, "Corpus directory")->required();
  ev->add_option("--pairs", pairs, "Number of (source, target) pairs")->capture_default_str();
  ev->add_option("--seed", seed, "Pair-selection seed")->capture_default_str();
  ev->add_option("--out", out, "Report path (JSON)")->required();
  ev->add_option("--speakers", eval_speakers, "Restrict pairs to these unseen speaker ids")->delimiter(',');
  ev->add_option("--audio-dir", audio_dir, "Write converted WAVs here");
  ev->add_flag("--no-floor", no_floor, "Skip the round-trip content floor");

  auto* gc = app.add_subcommand("grad-check", "Finite-difference check of reverse-mode gradients");
  gc->add_option("--scope", scope, "ops or model")->check(CLI::IsMember({"ops", "model"}))->capture_default_str();
  gc->add_option("--seed", seed, "Seed for inputs and subsampling")->capture_default_str();
  gc->add_option("--corrupt", corruption, "Test hook: perturb every analytic gradient entry by this amount")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) return gen_data(speakers, utterances, out, seed);
    if (*tr) return train(config, out, resume, force, log_every);
    if (*cv) return convert(checkpoint, source, target, out, mel_out);
    if (*ev) return evaluate_cmd(checkpoint, corpus, pairs, seed, out, eval_speakers, audio_dir, !no_floor);
    if (*gc) return grad_check_cmd(scope, seed, corruption);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
  return 2;
}
