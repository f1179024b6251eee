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

#include "selab/trainer.h"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "selab/metrics.h"

namespace selab {
namespace {

// Seed stream labels.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kBatchStream = 3;
constexpr std::uint64_t kNormStream = 4;

const std::vector<Utterance>& noise_list(const TrainingCorpus& corpus) {
  if (corpus.noise.noises.empty()) {
    throw std::invalid_argument("training corpus has an empty noise pool");
  }
  return corpus.noise.noises;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
  return idx;
}

}  // namespace

std::size_t TrainingCorpus::size() const {
  return std::visit(
      [](const auto& c) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, CleanSpeechCorpus>) {
          return c.clean.size();
        } else {
          return c.noisy.size();
        }
      },
      speech);
}

SnrSpec TrainConfig::effective_snr_spec() const {
  if (snr_spec) return *snr_spec;
  return strategy == Strategy::kNytt ? SnrSpec::NoisyTargetDefault()
                                     : SnrSpec::CleanTargetDefault();
}

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (val_count < 1) throw std::invalid_argument("TrainConfig: val_count must be >= 1");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
  model.validate();
  stft.validate();
  if (model.input_bins != stft.bins()) {
    throw std::invalid_argument("TrainConfig: model input_bins must equal win_len/2+1");
  }
}

std::vector<TrainingPair> build_batch(Strategy strategy,
                                      const TrainingCorpus& corpus,
                                      const SnrSpec& snr_spec,
                                      std::span<const std::size_t> speech_indices,
                                      std::uint64_t seed) {
  const auto& noises = noise_list(corpus);
  std::vector<TrainingPair> batch;
  batch.reserve(speech_indices.size());

  if (strategy == Strategy::kNytt) {
    const auto* noisy = std::get_if<NoisySpeechCorpus>(&corpus.speech);
    if (noisy == nullptr) {
      throw std::invalid_argument("NyTT needs a noisy-speech corpus; got clean speech");
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < speech_indices.size(); ++i) {
      const Utterance& x = noisy->noisy.at(speech_indices[i]);
      const Utterance& n = noises[rng.index(noises.size())];
      PairSources src;
      src.noisy = x.wave;
      src.noise1 = n.wave;
      src.ids = {x.id, n.id};
      batch.push_back(make_pair(strategy, src, snr_spec, derive_seed(seed, 0x917, i)));
    }
    return batch;
  }

  const auto* clean = std::get_if<CleanSpeechCorpus>(&corpus.speech);
  if (clean == nullptr) {
    throw std::invalid_argument(std::string(to_string(strategy)) +
                                " needs a clean-speech corpus; got noisy speech");
  }
  if (strategy == Strategy::kCtt) {
    const auto assignments =
        swap_noise_augment(speech_indices.size(), noises.size(), seed);
    for (const auto& a : assignments) {
      const Utterance& s = clean->clean.at(speech_indices[a.clean_index]);
      const Utterance& n = noises[a.noise_index];
      PairSources src;
      src.clean = s.wave;
      src.noise1 = n.wave;
      src.ids = {s.id, n.id};
      batch.push_back(make_pair(strategy, src, snr_spec, a.seed));
    }
    return batch;
  }

  Rng rng(seed);
  for (std::size_t i = 0; i < speech_indices.size(); ++i) {
    const Utterance& s = clean->clean.at(speech_indices[i]);
    const Utterance& n1 = noises[rng.index(noises.size())];
    const Utterance& n2 = noises[rng.index(noises.size())];
    PairSources src;
    src.clean = s.wave;
    src.noise1 = n1.wave;
    src.noise2 = n2.wave;
    src.ids = {s.id, n1.id, n2.id};
    batch.push_back(make_pair(strategy, src, snr_spec, derive_seed(seed, 0x9E7, i)));
  }
  return batch;
}

std::vector<TrainingPair> build_batch(Strategy strategy,
                                      const TrainingCorpus& corpus,
                                      const SnrSpec& snr_spec, int batch_size,
                                      std::uint64_t seed) {
  if (batch_size < 1) throw std::invalid_argument("build_batch: batch_size must be >= 1");
  const std::size_t n = corpus.size();
  if (n == 0) throw std::invalid_argument("build_batch: empty speech corpus");
  Rng rng(derive_seed(seed, 0xB47C));
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = rng.index(n);
  return build_batch(strategy, corpus, snr_spec, idx, seed);
}

LossAndGradients batch_gradients(const MaskNet& net,
                                 std::span<const TrainingPair> batch,
                                 const StftParams& p) {
  if (batch.empty()) throw std::invalid_argument("batch_gradients: empty batch");
  LossAndGradients total{0.0, Gradients::ZerosLike(net)};
  for (const auto& pair : batch) {
    LossAndGradients item = backward(net, pair.input, pair.target, p);
    total.loss += item.loss;
    total.grads.add(item.grads);
  }
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  total.loss *= inv_m;
  total.grads.scale(inv_m);
  return total;
}

std::size_t epoch_batch_count(const TrainingCorpus& corpus, const TrainConfig& config) {
  const std::size_t m = static_cast<std::size_t>(config.batch_size);
  return (corpus.size() + m - 1) / m;
}

std::vector<TrainingPair> epoch_batch(const TrainingCorpus& corpus, const TrainConfig& config,
                                      int epoch_index, std::size_t b) {
  const std::size_t n = corpus.size();
  if (n == 0) throw std::invalid_argument("epoch_batch: empty speech corpus");
  const std::size_t m = static_cast<std::size_t>(config.batch_size);
  const std::size_t start = b * m;
  if (start >= n) throw std::out_of_range("epoch_batch: batch index past the epoch");
  const auto order =
      shuffled_indices(n, derive_seed(config.seed, kShuffleStream, epoch_index));
  const std::span<const std::size_t> idx(order.data() + start, std::min(m, n - start));
  return build_batch(config.strategy, corpus, config.effective_snr_spec(), idx,
                     derive_seed(config.seed, kBatchStream, epoch_index, b));
}

double train_epoch(MaskNet& net, AdamState& adam, const TrainingCorpus& corpus,
                   const TrainConfig& config, int epoch_index) {
  const std::size_t n = corpus.size();
  if (n == 0) throw std::invalid_argument("train_epoch: empty speech corpus");
  const std::size_t batches = epoch_batch_count(corpus, config);
  double loss_sum = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    const auto batch = epoch_batch(corpus, config, epoch_index, b);
    LossAndGradients lg = batch_gradients(net, batch, config.stft);
    if (!std::isfinite(lg.loss)) {
      std::ostringstream os;
      os << "non-finite loss at epoch " << epoch_index << ", batch " << b;
      throw std::runtime_error(os.str());
    }
    loss_sum += lg.loss * static_cast<double>(batch.size());
    adam_step(net, lg.grads, adam);
  }
  return loss_sum / static_cast<double>(n);
}

double validate(const MaskNet& net, const ValidationSet& val, const StftParams& p) {
  if (val.items.empty()) throw std::invalid_argument("validate: empty validation set");
  double sum = 0.0;
  for (const auto& item : val.items) {
    sum += si_sdr(enhance(net, item.input, p), item.reference);
  }
  return sum / static_cast<double>(val.items.size());
}

double validate_loss_proxy(const MaskNet& net, const ValidationSet& val,
                           const NoisePool& noise, const StftParams& p,
                           std::uint64_t seed) {
  if (val.items.empty()) throw std::invalid_argument("validate: empty validation set");
  NoisySpeechCorpus inputs;
  for (const auto& item : val.items) inputs.noisy.push_back({item.id, item.input});
  TrainingCorpus corpus{std::move(inputs), noise};
  std::vector<std::size_t> idx(val.items.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto pairs =
      build_batch(Strategy::kNytt, corpus, SnrSpec::NoisyTargetDefault(), idx, seed);
  double sum = 0.0;
  for (const auto& pair : pairs) sum += loss(enhance(net, pair.input, p), pair.target);
  return -sum / static_cast<double>(pairs.size());
}

void TrainHistory::write_csv(std::ostream& os) const {
  os << "epoch,mean_loss,val_si_sdr,is_best\n";
  char line[160];
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    std::snprintf(line, sizeof(line), "%d,%.9e,%.6f,%d\n", epochs[i].epoch,
                  epochs[i].mean_loss, epochs[i].val_score,
                  static_cast<int>(i) == best_index ? 1 : 0);
    os << line;
  }
}

TrainResult train(const TrainConfig& config, const TrainingCorpus& corpus,
                  const ValidationSet& val, const EpochCallback& on_epoch) {
  config.validate();
  MaskNet net = init(config.model, derive_seed(config.seed, kInitStream));

  // Feature statistics from one draw of training inputs.
  {
    std::vector<std::size_t> all(corpus.size());
    std::iota(all.begin(), all.end(), 0);
    const auto pairs = build_batch(config.strategy, corpus, config.effective_snr_spec(),
                                   all, derive_seed(config.seed, kNormStream));
    std::vector<Eigen::MatrixXd> feats;
    feats.reserve(pairs.size());
    for (const auto& pr : pairs) feats.push_back(log_magnitude(stft(pr.input, config.stft)));
    fit_feature_normalization(net, feats);
  }

  auto score = [&](const MaskNet& m) {
    if (config.validation == ValidationMode::kLossProxy) {
      return validate_loss_proxy(m, val, corpus.noise, config.stft,
                                 derive_seed(config.seed, 0x7A1));
    }
    return validate(m, val, config.stft);
  };

  AdamState adam = AdamState::For(net, config.learning_rate);
  TrainResult result{net, adam, {}};
  result.history.initial_val_score = score(net);

  for (int e = 1; e <= config.epochs; ++e) {
    EpochRecord rec;
    rec.epoch = e;
    rec.mean_loss = train_epoch(net, adam, corpus, config, e);
    rec.val_score = score(net);
    result.history.epochs.push_back(rec);
    const int idx = static_cast<int>(result.history.epochs.size()) - 1;
    if (result.history.best_index < 0 ||
        rec.val_score > result.history.epochs[result.history.best_index].val_score) {
      result.history.best_index = idx;
      result.best = net;
      result.adam = adam;
    }
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

}  // namespace selab
