// Copyright 2026 The selab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// selab command-line driver.
//
//   selab synth-corpus --out DIR [--config FILE] [--seed N]
//   selab train        --out DIR [--config FILE] [--seed N]
//   selab evaluate     --out DIR --checkpoint FILE [--config FILE] [--seed N]
//   selab poc | snr-sweep | noise-sweep | overlap  --out DIR [...]
//
// --set section.key=value overrides one config key and may be repeated.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selab/config.h"
#include "selab/corpus.h"
#include "selab/experiments.h"
#include "selab/model.h"
#include "selab/overlap.h"
#include "selab/report.h"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "INI config file (defaults apply if omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "master seed; overrides [experiment] seed");
  cmd->add_option("--out", args.out, "output directory")->required();
  cmd->add_option("--set", args.overrides, "override a key, e.g. --set train.epochs=5");
}

selab::LabConfig resolve_config(const CommonArgs& args, CLI::App* cmd) {
  selab::LabConfig config;
  if (!args.config_path.empty()) config = selab::load_config(args.config_path);
  for (const auto& item : args.overrides) {
    const auto eq = item.find('=');
    const auto dot = item.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw std::invalid_argument("--set expects section.key=value, got '" + item + "'");
    }
    const std::string section = item.substr(0, dot);
    const std::string key = item.substr(dot + 1, eq - dot - 1);
    selab::apply_setting(config, section, key, item.substr(eq + 1));
  }
  config.validate();
  if (cmd->count("--seed") > 0) config.experiment.seed = args.seed;
  return config;
}

selab::Progress stderr_progress() {
  const auto start = std::chrono::steady_clock::now();
  return [start](const std::string& line) {
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "[%8.1fs] %s\n", t, line.c_str());
  };
}

void list_written(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << f.string() << '\n';
}

selab::LabCorpus corpus_for(const selab::LabConfig& config, const selab::Progress& progress) {
  progress(config.corpus.manifest.empty() ? "synthesizing corpus"
                                          : "loading corpus " + config.corpus.manifest);
  return selab::obtain_corpus(config.corpus, config.experiment.seed);
}

int run_synth_corpus(const selab::LabConfig& config, const std::filesystem::path& out) {
  const selab::LabCorpus corpus = selab::build_corpus(config.corpus, config.experiment.seed);
  selab::write_corpus(corpus, out);
  std::cout << (out / "manifest.json").string() << '\n';
  std::cerr << corpus.manifest.entries.size() << " entries written\n";
  return 0;
}

int run_train(const selab::LabConfig& config, const std::filesystem::path& out) {
  const auto progress = stderr_progress();
  const selab::LabCorpus corpus = corpus_for(config, progress);
  const selab::Strategy strategy = config.train.strategy;
  const selab::TrainResult r = selab::train_run(
      config, strategy, selab::poc_training_corpus(strategy, config, corpus),
      selab::validation_set(config, corpus), std::string(selab::to_string(strategy)), progress);
  std::filesystem::create_directories(out);
  selab::save_checkpoint(out / "best.ckpt", r.best, r.adam);
  std::ofstream history(out / "train_history.csv", std::ios::binary | std::ios::trunc);
  r.history.write_csv(history);
  std::ofstream ini(out / "train_config.ini", std::ios::binary | std::ios::trunc);
  ini << selab::to_ini(config);
  std::cout << (out / "best.ckpt").string() << '\n'
            << (out / "train_history.csv").string() << '\n'
            << (out / "train_config.ini").string() << '\n';
  return 0;
}

int run_evaluate(const selab::LabConfig& config, const std::filesystem::path& out,
                 const std::string& checkpoint) {
  const auto progress = stderr_progress();
  const selab::LabCorpus corpus = corpus_for(config, progress);
  const selab::Checkpoint ck = selab::load_checkpoint(checkpoint);
  const std::vector<selab::MetricsReport> matched = {selab::evaluate(
      ck.net, selab::matched_test_set(config, corpus), config.train.stft, "checkpoint")};
  const std::vector<selab::MetricsReport> mismatched = {selab::evaluate(
      ck.net, selab::mismatched_test_set(config, corpus), config.train.stft, "checkpoint")};
  list_written(selab::emit_metrics_report(config, matched, out, "evaluate_matched"));
  list_written(selab::emit_metrics_report(config, mismatched, out, "evaluate_mismatched"));
  std::fprintf(stderr, "matched si_sdri %.3f dB, mismatched si_sdri %.3f dB\n",
               matched[0].si_sdri.mean, mismatched[0].si_sdri.mean);
  return 0;
}

int run_overlap(const selab::LabConfig& config, const std::filesystem::path& out) {
  const auto progress = stderr_progress();
  const selab::LabCorpus corpus = corpus_for(config, progress);
  std::vector<selab::EmbeddingRow> rows;
  auto embed = [&](const std::string& pool) {
    std::vector<Eigen::VectorXd> e;
    for (const auto& clip : corpus.pool(pool)) {
      e.push_back(selab::band_log_energy(clip.wave));
      rows.push_back({pool, clip.id, e.back()});
    }
    return e;
  };
  const auto obs = embed("obs");
  std::vector<selab::OverlapRow> scores;
  for (const auto& family : config.experiment.noise_families) {
    scores.push_back({family, selab::overlap_stats(embed(family), obs)});
    std::fprintf(stderr, "%s vs obs: score %.6e (distance %.4f, scale %.4f)\n", family.c_str(),
                 scores.back().stats.score, scores.back().stats.distance,
                 scores.back().stats.scale);
  }
  std::filesystem::create_directories(out);
  std::ofstream o(out / "noise_overlap.csv", std::ios::binary | std::ios::trunc);
  selab::write_overlap_csv(o, scores);
  std::ofstream e(out / "noise_embeddings.csv", std::ios::binary | std::ios::trunc);
  selab::write_embeddings_csv(e, rows);
  std::cout << (out / "noise_overlap.csv").string() << '\n'
            << (out / "noise_embeddings.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selab: speech-enhancement training lab"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string checkpoint;
  CLI::App* synth_cmd = app.add_subcommand("synth-corpus", "write the synthetic corpus and manifest");
  CLI::App* train_cmd = app.add_subcommand("train", "train one strategy ([train] strategy)");
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score a checkpoint on the test sets");
  CLI::App* poc_cmd = app.add_subcommand("poc", "proof of concept: CTT vs NeTT vs NyTT");
  CLI::App* snr_cmd = app.add_subcommand("snr-sweep", "NyTT across noisy-target SNRs");
  CLI::App* noise_cmd = app.add_subcommand("noise-sweep", "NyTT across additional-noise families");
  CLI::App* overlap_cmd = app.add_subcommand("overlap", "noise overlap diagnostic only");
  for (CLI::App* cmd : {synth_cmd, train_cmd, eval_cmd, poc_cmd, snr_cmd, noise_cmd, overlap_cmd}) {
    add_common(cmd, args);
  }
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint written by train")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* cmd = app.get_subcommands().front();
    selab::LabConfig config = resolve_config(args, cmd);
    const std::filesystem::path out = args.out;
    if (cmd == synth_cmd) return run_synth_corpus(config, out);
    if (cmd == train_cmd) return run_train(config, out);
    if (cmd == eval_cmd) return run_evaluate(config, out, checkpoint);
    if (cmd == overlap_cmd) return run_overlap(config, out);

    const auto progress = stderr_progress();
    const selab::LabCorpus corpus = corpus_for(config, progress);
    if (cmd == poc_cmd) {
      config.experiment.experiment = selab::Experiment::kProofOfConcept;
      list_written(selab::emit_poc_report(config, selab::run_proof_of_concept(config, corpus, progress), out));
    } else if (cmd == snr_cmd) {
      config.experiment.experiment = selab::Experiment::kSnrSweep;
      list_written(selab::emit_snr_sweep_report(config, selab::run_snr_sweep(config, corpus, progress), out));
    } else if (cmd == noise_cmd) {
      config.experiment.experiment = selab::Experiment::kNoiseSweep;
      list_written(selab::emit_noise_sweep_report(config, selab::run_noise_sweep(config, corpus, progress), out));
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "selab: error: %s\n", e.what());
    return 1;
  }
}
