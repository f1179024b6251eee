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

#ifndef SELAB_SIGNAL_H_
#define SELAB_SIGNAL_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selab {

inline constexpr int kDefaultSampleRate = 16000;

/// Mono time-domain signal. Samples are finite doubles; the rate is positive.
/// Construction validates both, so a Waveform in hand is always usable.
class Waveform {
 public:
  Waveform(std::vector<double> samples, int sample_rate = kDefaultSampleRate);

  /// All-zero signal of `length` samples.
  static Waveform Zeros(std::size_t length,
                        int sample_rate = kDefaultSampleRate);

  std::span<const double> samples() const { return samples_; }
  const std::vector<double>& vec() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  int sample_rate() const { return sample_rate_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  bool operator==(const Waveform&) const = default;

 private:
  std::vector<double> samples_;
  int sample_rate_;
};

/// Returns (1/T) * sum of squared samples.
double mean_power(const Waveform& w);

/// Element-wise helpers used by the mixing and training code. Both operands
/// must share length and sample rate.
Waveform add(const Waveform& a, const Waveform& b);
Waveform subtract(const Waveform& a, const Waveform& b);
Waveform scale(const Waveform& w, double factor);
double dot(const Waveform& a, const Waveform& b);

enum class SynthKind { kSpeechLike, kWhiteNoise, kPinkNoise, kBandNoise,
                       kBabbleLike };

std::string_view to_string(SynthKind kind);
SynthKind synth_kind_from_string(std::string_view name);

struct SynthSpec {
  SynthKind kind = SynthKind::kWhiteNoise;
  double duration_s = 1.0;
  std::uint64_t seed = 0;
  // Only read for kBandNoise.
  double lo_hz = 0.0;
  double hi_hz = 0.0;

  bool operator==(const SynthSpec&) const = default;
};

/// Deterministic synthetic signal, peak-normalized to 0.5.
Waveform synth(const SynthSpec& spec, int sample_rate = kDefaultSampleRate);

/// Fraction of signal energy outside [lo_hz, hi_hz], measured on the
/// full-length discrete Fourier transform.
double out_of_band_energy_fraction(const Waveform& w, double lo_hz,
                                   double hi_hz);

/// Mixes a base seed with stream labels so independent draws never share
/// a generator state.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

/// Seeded generator with a portable mapping to the unit interval.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace selab

#endif  // SELAB_SIGNAL_H_
