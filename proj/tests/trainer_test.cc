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
#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "selab/metrics.h"
#include "test_util.h"

namespace selab {
namespace {

constexpr int kRate = 16000;

TrainConfig small_train_config(Strategy strategy) {
  TrainConfig c;
  c.strategy = strategy;
  c.epochs = 2;
  c.batch_size = 3;
  c.learning_rate = 1e-3;
  c.seed = 5;
  c.stft = StftParams{64, 16};
  c.model.input_bins = 33;
  c.model.context_frames = 3;
  c.model.hidden_sizes = {16};
  return c;
}

std::vector<Utterance> speech(int count, double seconds, std::uint64_t seed) {
  std::vector<Utterance> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({"s" + std::to_string(i),
                   synth({SynthKind::kSpeechLike, seconds, derive_seed(seed, i)}, kRate)});
  }
  return out;
}

NoisePool pink_pool(int count, double seconds, std::uint64_t seed) {
  NoisePool pool;
  for (int i = 0; i < count; ++i) {
    pool.noises.push_back({"n" + std::to_string(i),
                           synth({SynthKind::kPinkNoise, seconds, derive_seed(seed, i)}, kRate)});
  }
  return pool;
}

// Noisy speech at a fixed SNR; the clean halves go to `clean_out` for
// reference scoring only.
std::vector<Utterance> noisy_speech(const std::vector<Utterance>& clean, const NoisePool& noise,
                                    double snr_db, std::uint64_t seed) {
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const Mixture m = mix_at_snr(clean[i].wave, noise.noises[i % noise.noises.size()].wave,
                                 SnrDb(snr_db), derive_seed(seed, i));
    out.push_back({"x" + std::to_string(i), m.mix});
  }
  return out;
}

TrainingCorpus clean_corpus() {
  return {CleanSpeechCorpus{speech(7, 0.25, 1)}, pink_pool(3, 0.3, 2)};
}

TrainingCorpus noisy_corpus() {
  const NoisePool obs = pink_pool(3, 0.3, 3);
  return {NoisySpeechCorpus{noisy_speech(speech(7, 0.25, 4), obs, 10.0, 5)}, pink_pool(3, 0.3, 6)};
}

ValidationSet small_val() {
  const auto clean = speech(2, 0.25, 7);
  const auto noisy = noisy_speech(clean, pink_pool(2, 0.25, 8), 0.0, 9);
  return {{{"v0", noisy[0].wave, clean[0].wave}, {"v1", noisy[1].wave, clean[1].wave}}};
}

TEST(BuildBatchTest, SingletonBatchLossIsItemLoss) {
  const TrainingCorpus corpus = clean_corpus();
  const TrainConfig c = small_train_config(Strategy::kCtt);
  const auto batch = build_batch(Strategy::kCtt, corpus, c.effective_snr_spec(), 1, 11);
  ASSERT_EQ(batch.size(), 1u);
  const MaskNet net = init(c.model, 1);
  EXPECT_EQ(batch_gradients(net, batch, c.stft).loss,
            loss(enhance(net, batch[0].input, c.stft), batch[0].target));
}

TEST(BuildBatchTest, DeterministicPerSeed) {
  const TrainingCorpus corpus = noisy_corpus();
  const SnrSpec snr = SnrSpec::NoisyTargetDefault();
  const auto a = build_batch(Strategy::kNytt, corpus, snr, 4, 12);
  const auto b = build_batch(Strategy::kNytt, corpus, snr, 4, 12);
  const auto c = build_batch(Strategy::kNytt, corpus, snr, 4, 13);
  ASSERT_EQ(a.size(), 4u);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].input, b[i].input);
    EXPECT_EQ(a[i].target, b[i].target);
    any_diff |= !(a[i].input == c[i].input);
  }
  EXPECT_TRUE(any_diff);
}

TEST(BuildBatchTest, NyttPairsDecomposeIntoTargetPlusScaledNoise) {
  const TrainingCorpus corpus = noisy_corpus();
  const auto batch = build_batch(Strategy::kNytt, corpus, SnrSpec::NoisyTargetDefault(), 7, 14);
  const auto& noisy = std::get<NoisySpeechCorpus>(corpus.speech).noisy;
  for (const auto& p : batch) {
    ASSERT_EQ(p.meta.source_ids.size(), 2u);
    // The target is one of the noisy utterances, never anything cleaner.
    bool target_is_noisy = false;
    for (const auto& u : noisy) target_is_noisy |= u.id == p.meta.source_ids[0] && u.wave == p.target;
    EXPECT_TRUE(target_is_noisy);
    const Waveform* n = nullptr;
    for (const auto& u : corpus.noise.noises) {
      if (u.id == p.meta.source_ids[1]) n = &u.wave;
    }
    ASSERT_NE(n, nullptr);
    const Waveform gn = scale(fit_length(*n, p.target.size(), derive_seed(p.meta.seed, 1)),
                              p.meta.gains[0]);
    EXPECT_EQ(p.input, add(p.target, gn));
    EXPECT_NEAR(testing::measured_snr_db(p.target, gn), p.meta.snr_db[0], 1e-9);
    EXPECT_GE(p.meta.snr_db[0], -5.0);
    EXPECT_LE(p.meta.snr_db[0], 5.0);
  }
}

TEST(BuildBatchTest, CorpusTypingSeparatesStrategies) {
  const SnrSpec snr = SnrSpec::CleanTargetDefault();
  EXPECT_THROW(build_batch(Strategy::kNytt, clean_corpus(), snr, 2, 1), std::invalid_argument);
  EXPECT_THROW(build_batch(Strategy::kCtt, noisy_corpus(), snr, 2, 1), std::invalid_argument);
  EXPECT_THROW(build_batch(Strategy::kNett, noisy_corpus(), snr, 2, 1), std::invalid_argument);
}

TEST(BatchGradientsTest, IdenticalPairsGiveSinglePairGradient) {
  const TrainConfig c = small_train_config(Strategy::kCtt);
  const auto one = build_batch(Strategy::kCtt, clean_corpus(), c.effective_snr_spec(), 1, 15);
  const std::vector<TrainingPair> three = {one[0], one[0], one[0]};
  const MaskNet net = init(c.model, 2);
  const LossAndGradients a = batch_gradients(net, one, c.stft);
  const LossAndGradients b = batch_gradients(net, three, c.stft);
  EXPECT_NEAR(b.loss, a.loss, 1e-15 * a.loss);
  for (std::size_t i = 0; i < net.parameter_count(); ++i) {
    ASSERT_NEAR(gradient_at(b.grads, i), gradient_at(a.grads, i),
                1e-14 * std::abs(gradient_at(a.grads, i)) + 1e-300);
  }
}

TEST(BatchGradientsTest, BatchLossIsMeanOfItemLosses) {
  const TrainConfig c = small_train_config(Strategy::kNett);
  const auto batch = build_batch(Strategy::kNett, clean_corpus(), c.effective_snr_spec(), 5, 16);
  const MaskNet net = init(c.model, 3);
  double sum = 0.0;
  for (const auto& p : batch) sum += loss(enhance(net, p.input, c.stft), p.target);
  EXPECT_NEAR(batch_gradients(net, batch, c.stft).loss, sum / batch.size(), 1e-15 * sum);
}

TEST(TrainEpochTest, FrozenNetEpochLossMatchesRecomputation) {
  for (Strategy s : {Strategy::kCtt, Strategy::kNett, Strategy::kNytt}) {
    TrainConfig c = small_train_config(s);
    c.learning_rate = 0.0;
    const TrainingCorpus corpus = s == Strategy::kNytt ? noisy_corpus() : clean_corpus();
    MaskNet net = init(c.model, 4);
    const MaskNet frozen = net;
    AdamState adam = AdamState::For(net, 0.0);
    const double epoch_loss = train_epoch(net, adam, corpus, c, 3);
    ASSERT_TRUE(identical(net, frozen));

    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < epoch_batch_count(corpus, c); ++b) {
      for (const auto& p : epoch_batch(corpus, c, 3, b)) {
        sum += loss(enhance(frozen, p.input, c.stft), p.target);
        ++count;
      }
    }
    EXPECT_EQ(count, corpus.size());
    EXPECT_NEAR(epoch_loss, sum / count, 1e-12) << to_string(s);
    EXPECT_EQ(adam.step, static_cast<std::int64_t>(epoch_batch_count(corpus, c)));
  }
}

TEST(TrainEpochTest, PairsAreRedrawnEachEpoch) {
  const TrainConfig c = small_train_config(Strategy::kNytt);
  const TrainingCorpus corpus = noisy_corpus();
  EXPECT_NE(epoch_batch(corpus, c, 1, 0)[0].input, epoch_batch(corpus, c, 2, 0)[0].input);
  EXPECT_EQ(epoch_batch(corpus, c, 1, 0)[0].input, epoch_batch(corpus, c, 1, 0)[0].input);
}

TEST(TrainEpochTest, NyttWithCleanSentinelLearnsIdentity) {
  TrainConfig c = small_train_config(Strategy::kNytt);
  c.snr_spec = SnrSpec::Fixed(SnrDb::Clean());
  const TrainingCorpus corpus = noisy_corpus();
  for (const auto& p : epoch_batch(corpus, c, 1, 0)) EXPECT_EQ(p.input, p.target);
  MaskNet net = init(c.model, 5);
  net.layers.back().weight *= 20.0;  // start away from the identity
  AdamState adam = AdamState::For(net, 3e-3);
  const double first = train_epoch(net, adam, corpus, c, 1);
  double last = first;
  for (int e = 2; e <= 40; ++e) last = train_epoch(net, adam, corpus, c, e);
  EXPECT_LT(last, 0.1 * first);
}

TEST(ValidateTest, IdentityNetScoresInput) {
  MaskNetConfig mc = small_train_config(Strategy::kCtt).model;
  MaskNet net = init(mc, 6);
  for (auto& l : net.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  net.layers.back().bias.head(mc.input_bins).setConstant(std::atanh(1.0 / mc.mask_bound));
  const ValidationSet val = small_val();
  double hand = 0.0;
  for (const auto& item : val.items) hand += si_sdr(item.input, item.reference);
  EXPECT_NEAR(validate(net, val, StftParams{64, 16}), hand / 2.0, 1e-6);
}

TEST(ValidateTest, ZeroNetScoresFloorAndMeanIsHandAverage) {
  const TrainConfig c = small_train_config(Strategy::kCtt);
  MaskNet net = init(c.model, 7);
  const ValidationSet val = small_val();
  const double a = si_sdr(enhance(net, val.items[0].input, c.stft), val.items[0].reference);
  const double b = si_sdr(enhance(net, val.items[1].input, c.stft), val.items[1].reference);
  EXPECT_DOUBLE_EQ(validate(net, val, c.stft), (a + b) / 2.0);
  for (auto& l : net.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  EXPECT_EQ(validate(net, val, c.stft), -kSiSdrCap);
  EXPECT_THROW(validate(net, ValidationSet{}, c.stft), std::invalid_argument);
}

TEST(TrainTest, ZeroEpochsReturnsInitialNet) {
  TrainConfig c = small_train_config(Strategy::kCtt);
  c.epochs = 0;
  const TrainResult r = train(c, clean_corpus(), small_val());
  EXPECT_TRUE(r.history.epochs.empty());
  EXPECT_EQ(r.history.best_index, -1);
  EXPECT_EQ(validate(r.best, small_val(), c.stft), r.history.initial_val_score);
  EXPECT_EQ(r.adam.step, 0);
}

TEST(TrainTest, SameSeedSameCheckpointAndBestIsArgmax) {
  TrainConfig c = small_train_config(Strategy::kNytt);
  c.epochs = 4;
  const TrainingCorpus corpus = noisy_corpus();
  int callbacks = 0;
  const TrainResult a = train(c, corpus, small_val(), [&](const EpochRecord&) { ++callbacks; });
  const TrainResult b = train(c, corpus, small_val());
  EXPECT_EQ(callbacks, 4);
  EXPECT_TRUE(identical(a.best, b.best));
  ASSERT_EQ(a.history.epochs.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.history.epochs[i].epoch, static_cast<int>(i) + 1);
    EXPECT_EQ(a.history.epochs[i].mean_loss, b.history.epochs[i].mean_loss);
    EXPECT_GE(a.history.epochs[a.history.best_index].val_score, a.history.epochs[i].val_score);
  }
  EXPECT_EQ(validate(a.best, small_val(), c.stft),
            a.history.epochs[a.history.best_index].val_score);
}

TEST(TrainTest, HistoryCsvSchema) {
  TrainHistory h;
  h.epochs = {{1, 0.5, 3.25}, {2, 0.25, 4.5}};
  h.best_index = 1;
  std::ostringstream os;
  h.write_csv(os);
  EXPECT_EQ(os.str(),
            "epoch,mean_loss,val_si_sdr,is_best\n"
            "1,5.000000000e-01,3.250000,0\n"
            "2,2.500000000e-01,4.500000,1\n");
}

TEST(TrainTest, SmallNyttRunBeatsIdentityBaseline) {
  // 30 one-second noisy utterances at 5-15 dB; no clean target is ever used
  // for the gradient, only for validation.
  const auto clean = speech(30, 1.0, 20);
  const NoisePool obs = pink_pool(6, 1.0, 21);
  std::vector<Utterance> noisy;
  Rng rng(22);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const Mixture m = mix_at_snr(clean[i].wave, obs.noises[i % 6].wave,
                                 SnrDb(rng.uniform(5.0, 15.0)), derive_seed(23, i));
    noisy.push_back({"x" + std::to_string(i), m.mix});
  }
  const TrainingCorpus corpus{NoisySpeechCorpus{noisy}, pink_pool(6, 1.0, 24)};
  ValidationSet val;
  const auto vclean = speech(4, 1.0, 25);
  const NoisePool vnoise = pink_pool(4, 1.0, 26);
  for (int i = 0; i < 4; ++i) {
    val.items.push_back({"v" + std::to_string(i),
                         mix_at_snr(vclean[i].wave, vnoise.noises[i].wave, SnrDb(0.0), 27 + i).mix,
                         vclean[i].wave});
  }
  TrainConfig c;
  c.strategy = Strategy::kNytt;
  c.epochs = 6;
  c.batch_size = 4;
  c.learning_rate = 1e-3;
  c.seed = 3;
  c.model.hidden_sizes = {64};
  c.model.context_frames = 3;
  const TrainResult r = train(c, corpus, val);
  EXPECT_GT(r.history.epochs[r.history.best_index].val_score, r.history.initial_val_score);
}

}  // namespace
}  // namespace selab
