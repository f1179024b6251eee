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

// SNR-exact mixing and training-pair synthesis for the three training
// strategies:
//   CTT  (clean target):  (s + g n, s)
//   NeTT (noise target):  (s + g1 n1, s + g2 n2)
//   NyTT (noisy target):  (x + g n, x), where x is an already-noisy recording
// SNR is always 10 log10 of the mean-power ratio between the signal being
// corrupted (s, or x for NyTT) and the scaled noise, over the full utterance.

#ifndef SELAB_MIXER_H_
#define SELAB_MIXER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selab/signal.h"

namespace selab {

/// Decibel value, finite or the +inf sentinel that means "no noise added".
class SnrDb {
 public:
  explicit SnrDb(double db);
  static SnrDb Clean();

  double db() const { return db_; }
  bool is_clean() const;
  std::string label() const;  // "inf" for the sentinel

  /// Parses a decimal number or one of "inf", "+inf", "clean".
  static SnrDb Parse(std::string_view text);

 private:
  double db_;
};

/// How the SNR of one mixing operation is drawn.
struct SnrSpec {
  enum class Kind { kDiscrete, kUniform, kFixed };
  Kind kind = Kind::kDiscrete;
  std::vector<double> values;  // kDiscrete
  double lo = 0.0, hi = 0.0;   // kUniform
  double fixed = 0.0;          // kFixed; may be +inf

  static SnrSpec Discrete(std::vector<double> values);
  static SnrSpec Uniform(double lo, double hi);
  static SnrSpec Fixed(SnrDb snr);
  /// {-5, 0, 5, 10} dB, used for CTT and NeTT.
  static SnrSpec CleanTargetDefault();
  /// Uniform[-5, 5] dB, used for NyTT.
  static SnrSpec NoisyTargetDefault();

  SnrDb draw(Rng& rng) const;
  std::string describe() const;
  /// Inverse of describe(): "set:-5,0,5", "uniform:-5,5" or "fixed:inf".
  static SnrSpec Parse(std::string_view text);
};

enum class Strategy { kCtt, kNett, kNytt };
std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

struct PairMeta {
  std::vector<double> snr_db;        // one entry per mixing operation
  std::vector<double> gains;         // noise gains, same order
  std::vector<std::string> source_ids;
  std::uint64_t seed = 0;
};

struct TrainingPair {
  Waveform input;
  Waveform target;
  Strategy strategy;
  PairMeta meta;
};

/// Gain g such that signal + g * noise has the requested SNR. Throws
/// std::domain_error("undefined SNR ...") if either input is silent
/// (mean power <= 1e-12) and std::invalid_argument for a non-finite snr.
double gain_for_snr(const Waveform& signal, const Waveform& noise, SnrDb snr);

/// Random crop (longer input) or circular tiling from a random offset
/// (shorter input) to exactly target_len samples.
Waveform fit_length(const Waveform& n, std::size_t target_len,
                    std::uint64_t seed);

struct Mixture {
  Waveform mix;           // x + g * fit(n)
  Waveform scaled_noise;  // g * fit(n)
  double gain = 0.0;
};

/// Length-fits n to x, then adds it at the requested SNR. The +inf sentinel
/// returns x unchanged and a zero noise track.
Mixture mix_at_snr(const Waveform& x, const Waveform& n, SnrDb snr,
                   std::uint64_t seed);

/// Raw material for one pair. Which fields are required depends on the
/// strategy: CTT {clean, noise1}, NeTT {clean, noise1, noise2},
/// NyTT {noisy, noise1}.
struct PairSources {
  std::optional<Waveform> clean;
  std::optional<Waveform> noisy;
  std::optional<Waveform> noise1;
  std::optional<Waveform> noise2;
  std::vector<std::string> ids;
};

TrainingPair make_pair(Strategy strategy, const PairSources& sources,
                       const SnrSpec& snr_spec, std::uint64_t seed);

/// One CTT re-pairing: clean utterance `clean_index` mixed with pool entry
/// `noise_index`; the SNR draw and crop come from `seed`.
struct NoiseAssignment {
  std::size_t clean_index;
  std::size_t noise_index;
  std::uint64_t seed;
};

/// Replaces the observed noise of each clean utterance with a noise drawn
/// uniformly from the pooled noise corpus. Throws on an empty pool.
std::vector<NoiseAssignment> swap_noise_augment(std::size_t clean_count,
                                                std::size_t noise_pool_size,
                                                std::uint64_t seed);

}  // namespace selab

#endif  // SELAB_MIXER_H_
