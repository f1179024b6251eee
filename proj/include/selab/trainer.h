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

// Minibatch training for the three strategies. Every batch loss is
// (1/M) sum_m MSE(enhance(input_m), target_m); gradients are averaged the
// same way before one Adam step. Pairs are re-synthesized every epoch.
//
// Corpus typing keeps clean speech out of NyTT training: a NyTT run is fed a
// NoisySpeechCorpus, which has no clean field. Clean references only reach
// the trainer through ValidationSet, which is read by validate() alone.

#ifndef SELAB_TRAINER_H_
#define SELAB_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "selab/mixer.h"
#include "selab/model.h"
#include "selab/stft.h"

namespace selab {

struct Utterance {
  std::string id;
  Waveform wave;
};

/// Clean speech, for CTT and NeTT.
struct CleanSpeechCorpus {
  std::vector<Utterance> clean;
};

/// Already-noisy recordings with no clean decomposition, for NyTT.
struct NoisySpeechCorpus {
  std::vector<Utterance> noisy;
};

struct NoisePool {
  std::vector<Utterance> noises;
};

struct TrainingCorpus {
  std::variant<CleanSpeechCorpus, NoisySpeechCorpus> speech;
  NoisePool noise;

  std::size_t size() const;
};

struct ValidationItem {
  std::string id;
  Waveform input;
  Waveform reference;
};

struct ValidationSet {
  std::vector<ValidationItem> items;
};

enum class ValidationMode {
  kSiSdr,      // mean SI-SDR against clean references
  kLossProxy,  // minus the mean NyTT-style MSE on the inputs; no references
};

struct TrainConfig {
  Strategy strategy = Strategy::kNytt;
  int epochs = 60;
  int batch_size = 16;
  int val_count = 10;
  std::optional<SnrSpec> snr_spec;  // unset: per-strategy default
  std::uint64_t seed = 0;
  double learning_rate = 1e-4;
  MaskNetConfig model;
  StftParams stft;
  ValidationMode validation = ValidationMode::kSiSdr;

  SnrSpec effective_snr_spec() const;
  void validate() const;
};

/// Pairs for the given speech indices, each with fresh noise and SNR draws
/// derived from `seed`. Throws std::invalid_argument if the corpus does not
/// offer what the strategy needs.
std::vector<TrainingPair> build_batch(Strategy strategy,
                                      const TrainingCorpus& corpus,
                                      const SnrSpec& snr_spec,
                                      std::span<const std::size_t> speech_indices,
                                      std::uint64_t seed);

/// batch_size pairs over speech indices drawn uniformly with replacement.
std::vector<TrainingPair> build_batch(Strategy strategy,
                                      const TrainingCorpus& corpus,
                                      const SnrSpec& snr_spec, int batch_size,
                                      std::uint64_t seed);

/// Mean loss and averaged gradient of a batch.
LossAndGradients batch_gradients(const MaskNet& net,
                                 std::span<const TrainingPair> batch,
                                 const StftParams& p);

/// Number of batches in one epoch: ceil(corpus size / batch size).
std::size_t epoch_batch_count(const TrainingCorpus& corpus, const TrainConfig& config);

/// Batch `b` of epoch `epoch_index`, exactly as train_epoch builds it.
std::vector<TrainingPair> epoch_batch(const TrainingCorpus& corpus, const TrainConfig& config,
                                      int epoch_index, std::size_t b);

/// One pass over a shuffled permutation of the corpus; one Adam step per
/// batch. Returns the mean of the per-pair losses. Throws
/// std::runtime_error with epoch/batch coordinates on a non-finite loss.
double train_epoch(MaskNet& net, AdamState& adam, const TrainingCorpus& corpus,
                   const TrainConfig& config, int epoch_index);

/// Mean SI-SDR of enhance(net, input) against the clean references.
double validate(const MaskNet& net, const ValidationSet& val, const StftParams& p);

/// Minus the mean MSE between enhance(net, x + n) and x, with fixed noise
/// draws from `noise`. Reads only ValidationItem::input.
double validate_loss_proxy(const MaskNet& net, const ValidationSet& val,
                           const NoisePool& noise, const StftParams& p,
                           std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double val_score = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_index = -1;  // index into epochs; -1 when no epoch ran
  double initial_val_score = 0.0;

  /// CSV columns: epoch, mean_loss, val_si_sdr, is_best.
  void write_csv(std::ostream& os) const;
};

struct TrainResult {
  MaskNet best;
  AdamState adam;  // optimizer state at the best epoch
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train(const TrainConfig& config, const TrainingCorpus& corpus,
                  const ValidationSet& val, const EpochCallback& on_epoch = {});

}  // namespace selab

#endif  // SELAB_TRAINER_H_
