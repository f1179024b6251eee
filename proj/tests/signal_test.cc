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


#include "selab/signal.h"

#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace selab {
namespace {

// Fraction of energy outside [lo, hi] Hz, from a direct DFT over the in-band
// bins and Parseval for the total.
double dft_out_of_band_fraction(const Waveform& w, double lo_hz, double hi_hz) {
  const std::size_t n = w.size();
  std::vector<double> c(n), s(n);
  for (std::size_t t = 0; t < n; ++t) {
    c[t] = std::cos(2.0 * M_PI * t / n);
    s[t] = -std::sin(2.0 * M_PI * t / n);
  }
  const double bin_hz = static_cast<double>(w.sample_rate()) / n;
  double in = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = k * bin_hz;
    if (f < lo_hz || f > hi_hz) continue;
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t j = (k * t) % n;
      acc += w[t] * std::complex<double>(c[j], s[j]);
    }
    const bool single = k == 0 || 2 * k == n;
    in += std::norm(acc) * (single ? 1.0 : 2.0);
  }
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) total += w[t] * w[t];
  total *= static_cast<double>(n);
  return 1.0 - in / total;
}

TEST(MeanPowerTest, Examples) {
  EXPECT_EQ(mean_power(Waveform::Zeros(100)), 0.0);
  EXPECT_EQ(mean_power(Waveform(std::vector<double>(8, 1.0))), 1.0);
  EXPECT_EQ(mean_power(Waveform({3.0, -4.0})), 12.5);
}

TEST(MeanPowerTest, QuadraticInScale) {
  const Waveform w = testing::random_wave(1000, 11);
  for (double a : {-3.0, 0.1, 2.0, 17.5}) {
    EXPECT_NEAR(mean_power(scale(w, a)), a * a * mean_power(w), 1e-12 * a * a * mean_power(w));
  }
}

TEST(WaveformTest, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Waveform(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(Waveform({0.0, NAN}), std::invalid_argument);
  EXPECT_THROW(Waveform({0.0, INFINITY}), std::invalid_argument);
  EXPECT_THROW(Waveform({0.0}, 0), std::invalid_argument);
}

TEST(SynthTest, WhiteNoiseIsDeterministic) {
  const SynthSpec spec{SynthKind::kWhiteNoise, 1.0, 7};
  EXPECT_EQ(synth(spec, 16000), synth(spec, 16000));
  SynthSpec other = spec;
  other.seed = 8;
  EXPECT_NE(synth(spec), synth(other));
}

TEST(SynthTest, EveryKindIsDeterministicAndPeakNormalized) {
  for (SynthKind kind : {SynthKind::kSpeechLike, SynthKind::kWhiteNoise, SynthKind::kPinkNoise,
                         SynthKind::kBandNoise, SynthKind::kBabbleLike}) {
    const SynthSpec spec{kind, 0.5, 42, 500.0, 4000.0};
    const Waveform a = synth(spec);
    EXPECT_EQ(a, synth(spec)) << to_string(kind);
    double peak = 0.0;
    for (double v : a.samples()) peak = std::max(peak, std::abs(v));
    EXPECT_NEAR(peak, 0.5, 1e-12) << to_string(kind);
  }
}

TEST(SynthTest, BandNoiseIsConfinedToItsBand) {
  const Waveform w = synth({SynthKind::kBandNoise, 1.0, 1, 6000.0, 8000.0});
  const double oracle = dft_out_of_band_fraction(w, 6000.0, 8000.0);
  EXPECT_LT(oracle, 0.01);
  EXPECT_NEAR(out_of_band_energy_fraction(w, 6000.0, 8000.0), oracle, 1e-9);
}

TEST(SynthTest, SpeechLikeLength) {
  EXPECT_EQ(synth({SynthKind::kSpeechLike, 2.0, 3}, 16000).size(), 32000u);
}

TEST(SynthTest, SpeechLikeHasSilentGaps) {
  const Waveform w = synth({SynthKind::kSpeechLike, 2.0, 3});
  std::size_t silent = 0;
  for (double v : w.samples()) silent += v == 0.0;
  const double fraction = static_cast<double>(silent) / w.size();
  EXPECT_GT(fraction, 0.1);
  EXPECT_LT(fraction, 0.3);
}

TEST(SynthTest, RejectsBadBandEdges) {
  EXPECT_THROW(synth({SynthKind::kBandNoise, 1.0, 1, 4000.0, 3000.0}), std::invalid_argument);
  EXPECT_THROW(synth({SynthKind::kBandNoise, 1.0, 1, 100.0, 9000.0}), std::invalid_argument);
  EXPECT_THROW(synth({SynthKind::kWhiteNoise, 0.0, 1}), std::invalid_argument);
}

TEST(SynthTest, KindNamesRoundTrip) {
  for (SynthKind kind : {SynthKind::kSpeechLike, SynthKind::kWhiteNoise, SynthKind::kPinkNoise,
                         SynthKind::kBandNoise, SynthKind::kBabbleLike}) {
    EXPECT_EQ(synth_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(synth_kind_from_string("violin"), std::invalid_argument);
}

TEST(DeriveSeedTest, LabelsSeparateStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a) {
    for (std::uint64_t b = 0; b < 4; ++b) seen.insert(derive_seed(9, a, b));
  }
  EXPECT_EQ(seen.size(), 200u);
  EXPECT_EQ(derive_seed(9, 1, 2, 3), derive_seed(9, 1, 2, 3));
}

TEST(RngTest, UniformAndIndexStayInRange) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.index(7), 7u);
  }
}

}  // namespace
}  // namespace selab
