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

#include "selab/experiments.h"

#include <cstdio>
#include <stdexcept>

#include "selab/overlap.h"

namespace selab {
namespace {

constexpr std::uint64_t kTrainStream = 0x7EA1;
constexpr std::uint64_t kValStream = 0x7A1;
constexpr std::uint64_t kMatchedStream = 0x7E57;
constexpr std::uint64_t kMismatchedStream = 0x7E58;
constexpr std::uint64_t kNoiseTestStream = 0x7E59;
constexpr std::uint64_t kSweepCorpusStream = 0x5EE9;

std::string summary_line(const std::string& label, const TrainHistory& h,
                         const MetricsReport& r) {
  char buf[256];
  const double best = h.best_index >= 0 ? h.epochs[h.best_index].val_score : h.initial_val_score;
  std::snprintf(buf, sizeof(buf),
                "%s: best epoch %d (val %.3f dB, initial %.3f dB); %s si_sdr_in %.3f "
                "si_sdr_out %.3f si_sdri %.3f dB",
                label.c_str(), h.best_index + 1, best, h.initial_val_score, r.method.c_str(),
                r.si_sdr_in.mean, r.si_sdr_out.mean, r.si_sdri.mean);
  return buf;
}

void say(const Progress& progress, const std::string& line) {
  if (progress) progress(line);
}

}  // namespace

NoisePool make_noise_pool(const LabCorpus& corpus, const std::vector<std::string>& pools) {
  NoisePool out;
  for (const auto& name : pools) {
    for (const auto& clip : corpus.pool(name)) out.noises.push_back(clip);
  }
  return out;
}

TrainingCorpus poc_training_corpus(Strategy strategy, const LabConfig& config,
                                   const LabCorpus& corpus) {
  NoisePool pool = make_noise_pool(corpus, config.experiment.poc_noises);
  if (strategy == Strategy::kNytt) {
    return TrainingCorpus{NoisySpeechCorpus{corpus.train_noisy}, std::move(pool)};
  }
  return TrainingCorpus{CleanSpeechCorpus{corpus.train_clean}, std::move(pool)};
}

std::uint64_t training_seed(const LabConfig& config) {
  return derive_seed(config.experiment.seed, kTrainStream);
}

ValidationSet validation_set(const LabConfig& config, const LabCorpus& corpus) {
  return make_eval_set(corpus.val_clean, corpus.pool("val"), config.corpus.test_snr,
                       derive_seed(config.experiment.seed, kValStream));
}

ValidationSet matched_test_set(const LabConfig& config, const LabCorpus& corpus) {
  return make_eval_set(corpus.test_clean, corpus.pool("test"), config.corpus.test_snr,
                       derive_seed(config.experiment.seed, kMatchedStream));
}

ValidationSet mismatched_test_set(const LabConfig& config, const LabCorpus& corpus) {
  return make_eval_set(corpus.test_clean, corpus.pool("heldout"), config.corpus.test_snr,
                       derive_seed(config.experiment.seed, kMismatchedStream));
}

ValidationSet noise_sweep_test_set(const LabConfig& config, const LabCorpus& corpus) {
  return make_eval_set(corpus.test_clean, corpus.pool("heldout"), config.corpus.noise_test_snr,
                       derive_seed(config.experiment.seed, kNoiseTestStream));
}

MetricsReport evaluate(const MaskNet& net, const ValidationSet& test, const StftParams& p,
                       std::string method) {
  std::vector<UtteranceScore> records;
  records.reserve(test.items.size());
  for (const auto& item : test.items) {
    records.push_back(
        score_utterance(item.id, enhance(net, item.input, p), item.input, item.reference, p));
  }
  return make_report(std::move(method), std::move(records));
}

TrainResult train_run(const LabConfig& config, Strategy strategy, const TrainingCorpus& corpus,
                      const ValidationSet& val, const std::string& label,
                      const Progress& progress) {
  TrainConfig tc = config.train;
  tc.strategy = strategy;
  tc.seed = training_seed(config);
  return train(tc, corpus, val, [&](const EpochRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s epoch %d: loss %.6e val %.3f dB", label.c_str(),
                  r.epoch, r.mean_loss, r.val_score);
    say(progress, buf);
  });
}

PocResult run_proof_of_concept(const LabConfig& config, const LabCorpus& corpus,
                               const Progress& progress) {
  const ValidationSet val = validation_set(config, corpus);
  const ValidationSet matched = matched_test_set(config, corpus);
  const ValidationSet mismatched = mismatched_test_set(config, corpus);
  PocResult out;
  for (Strategy s : {Strategy::kCtt, Strategy::kNett, Strategy::kNytt}) {
    std::string label(to_string(s));
    if (s == Strategy::kNytt && config.corpus.train_count_multiplier > 1) label += "(L)";
    const TrainResult r = train_run(config, s, poc_training_corpus(s, config, corpus), val,
                                    label, progress);
    out.matched.push_back(evaluate(r.best, matched, config.train.stft, label));
    out.mismatched.push_back(evaluate(r.best, mismatched, config.train.stft, label));
    out.runs.push_back({label, r.history});
    say(progress, summary_line(label, r.history, out.matched.back()));
  }
  return out;
}

SweepResult run_snr_sweep(const LabConfig& config, const LabCorpus& corpus,
                          const Progress& progress) {
  const ValidationSet val = validation_set(config, corpus);
  const ValidationSet test = matched_test_set(config, corpus);
  NoisePool additional = make_noise_pool(corpus, {config.experiment.sweep_noise});
  // One additional-noise SNR distribution for every point, so the target
  // SNR is the only thing that varies.
  LabConfig point_config = config;
  if (!point_config.train.snr_spec) point_config.train.snr_spec = SnrSpec::NoisyTargetDefault();

  SweepResult out;
  for (const auto& label : config.experiment.sweep_snrs) {
    const SnrDb target = SnrDb::Parse(label);
    TrainResult r = [&] {
      if (target.is_clean()) {
        return train_run(point_config, Strategy::kCtt,
                         TrainingCorpus{CleanSpeechCorpus{corpus.train_clean}, additional},
                         val, "snr=" + label, progress);
      }
      NoisySpeechCorpus noisy =
          make_noisy_corpus(corpus.train_clean, corpus.pool("obs"), SnrSpec::Fixed(target),
                            derive_seed(config.experiment.seed, kSweepCorpusStream));
      return train_run(point_config, Strategy::kNytt,
                       TrainingCorpus{std::move(noisy), additional}, val, "snr=" + label,
                       progress);
    }();
    MetricsReport report = evaluate(r.best, test, config.train.stft, label);
    say(progress, summary_line("snr=" + label, r.history, report));
    out.points.push_back({label, std::move(report), r.history});
  }
  return out;
}

NoiseSweepResult run_noise_sweep(const LabConfig& config, const LabCorpus& corpus,
                                 const Progress& progress) {
  const ValidationSet val = validation_set(config, corpus);
  const ValidationSet test = noise_sweep_test_set(config, corpus);
  const auto& obs = corpus.pool("obs");
  auto embed = [](const std::vector<Utterance>& pool, const std::string& name,
                  std::vector<EmbeddingRow>& rows) {
    std::vector<Eigen::VectorXd> out;
    for (const auto& clip : pool) {
      out.push_back(band_log_energy(clip.wave));
      rows.push_back({name, clip.id, out.back()});
    }
    return out;
  };

  NoiseSweepResult out;
  const std::vector<Eigen::VectorXd> obs_embedded = embed(obs, "obs", out.embeddings);
  for (const auto& family : config.experiment.noise_families) {
    const auto& pool = corpus.pool(family);
    const TrainResult r =
        train_run(config, Strategy::kNytt,
                  TrainingCorpus{NoisySpeechCorpus{corpus.train_noisy}, NoisePool{pool}}, val,
                  "noise=" + family, progress);
    MetricsReport report = evaluate(r.best, test, config.train.stft, family);
    say(progress, summary_line("noise=" + family, r.history, report));
    out.points.push_back({family, std::move(report), r.history});
    out.overlap.push_back({family, overlap_stats(embed(pool, family, out.embeddings), obs_embedded)});
  }
  return out;
}

}  // namespace selab
