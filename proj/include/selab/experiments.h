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

// The three experiments, each fully determined by (LabConfig, LabCorpus).
//
//   proof of concept  CTT, NeTT and NyTT with the same training noise pool,
//                     scored on a matched test set (unseen speech + pink
//                     noise) and a mismatched one (unseen speech + the
//                     held-out noise family).
//   SNR sweep         NyTT on noisy corpora whose observation SNR is fixed
//                     per point; the "inf" point trains CTT on clean speech.
//   noise sweep       NyTT on the pink-observation noisy corpus, once per
//                     additional noise family, scored on held-out noise, plus
//                     the overlap of each family with the observation noise.
//
// Every training run in an experiment uses the same model seed, so points
// differ only in their data.

#ifndef SELAB_EXPERIMENTS_H_
#define SELAB_EXPERIMENTS_H_

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "selab/config.h"
#include "selab/corpus.h"
#include "selab/metrics.h"
#include "selab/overlap.h"
#include "selab/trainer.h"

namespace selab {

/// Receives one human-readable line per epoch and per finished run.
using Progress = std::function<void(const std::string&)>;

struct MethodRun {
  std::string label;
  TrainHistory history;
};

struct PocResult {
  std::vector<MetricsReport> matched;     // CTT, NeTT, NyTT
  std::vector<MetricsReport> mismatched;  // same order
  std::vector<MethodRun> runs;
};

struct SweepPoint {
  std::string label;
  MetricsReport report;
  TrainHistory history;
};

struct SweepResult {
  std::vector<SweepPoint> points;
};

struct OverlapRow {
  std::string family;
  OverlapStats stats;  // against the observation-noise pool
};

struct EmbeddingRow {
  std::string pool;
  std::string clip_id;
  Eigen::VectorXd embedding;
};

struct NoiseSweepResult {
  std::vector<SweepPoint> points;
  std::vector<OverlapRow> overlap;
  std::vector<EmbeddingRow> embeddings;
};

/// Concatenation of the named noise pools, in the given order.
NoisePool make_noise_pool(const LabCorpus& corpus, const std::vector<std::string>& pools);

/// Training corpus for one proof-of-concept strategy: clean training speech
/// for CTT/NeTT, the noisy corpus for NyTT, and the shared noise pool.
TrainingCorpus poc_training_corpus(Strategy strategy, const LabConfig& config,
                                   const LabCorpus& corpus);

ValidationSet validation_set(const LabConfig& config, const LabCorpus& corpus);
ValidationSet matched_test_set(const LabConfig& config, const LabCorpus& corpus);
ValidationSet mismatched_test_set(const LabConfig& config, const LabCorpus& corpus);
ValidationSet noise_sweep_test_set(const LabConfig& config, const LabCorpus& corpus);

/// Seed shared by every training run of an experiment.
std::uint64_t training_seed(const LabConfig& config);

MetricsReport evaluate(const MaskNet& net, const ValidationSet& test, const StftParams& p,
                       std::string method);

/// Trains `strategy` on `corpus` with the [train] settings of `config`.
TrainResult train_run(const LabConfig& config, Strategy strategy,
                      const TrainingCorpus& corpus, const ValidationSet& val,
                      const std::string& label, const Progress& progress = {});

PocResult run_proof_of_concept(const LabConfig& config, const LabCorpus& corpus,
                               const Progress& progress = {});
SweepResult run_snr_sweep(const LabConfig& config, const LabCorpus& corpus,
                          const Progress& progress = {});
NoiseSweepResult run_noise_sweep(const LabConfig& config, const LabCorpus& corpus,
                                 const Progress& progress = {});

}  // namespace selab

#endif  // SELAB_EXPERIMENTS_H_
