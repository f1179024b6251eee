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


#include "selab/overlap.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace selab {
namespace {

std::vector<Waveform> pool(SynthKind kind, int count, std::uint64_t seed, double lo = 0.0,
                           double hi = 0.0) {
  std::vector<Waveform> out;
  for (int i = 0; i < count; ++i) out.push_back(synth({kind, 0.5, derive_seed(seed, i), lo, hi}));
  return out;
}

TEST(MelFilterbankTest, ShapeAndCoverage) {
  const Eigen::MatrixXd fb = mel_filterbank(16, 257, 16000);
  EXPECT_EQ(fb.rows(), 16);
  EXPECT_EQ(fb.cols(), 257);
  EXPECT_GE(fb.minCoeff(), 0.0);
  EXPECT_LE(fb.maxCoeff(), 1.0);
  for (int b = 0; b < 16; ++b) EXPECT_GT(fb.row(b).sum(), 0.0) << b;
  // Centers increase with band index.
  int prev = -1;
  for (int b = 0; b < 16; ++b) {
    Eigen::Index arg;
    fb.row(b).maxCoeff(&arg);
    EXPECT_GE(static_cast<int>(arg), prev);
    prev = static_cast<int>(arg);
  }
  EXPECT_THROW(mel_filterbank(0, 257, 16000), std::invalid_argument);
}

TEST(BandLogEnergyTest, ScalingShiftsEveryBand) {
  const Waveform w = synth({SynthKind::kPinkNoise, 0.5, 1});
  const Eigen::VectorXd a = band_log_energy(w);
  const Eigen::VectorXd b = band_log_energy(scale(w, 10.0));
  ASSERT_EQ(a.size(), kOverlapBands);
  for (int i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i] - a[i], std::log(100.0), 1e-3);
}

TEST(OverlapTest, SelfScoreIsOne) {
  const auto p = pool(SynthKind::kPinkNoise, 8, 2);
  EXPECT_EQ(noise_overlap(p, p), 1.0);
}

TEST(OverlapTest, Symmetric) {
  const auto a = pool(SynthKind::kPinkNoise, 9, 3);
  const auto b = pool(SynthKind::kBabbleLike, 8, 4);
  EXPECT_DOUBLE_EQ(noise_overlap(a, b), noise_overlap(b, a));
  const double s = noise_overlap(a, b);
  EXPECT_GT(s, 0.0);
  EXPECT_LE(s, 1.0);
}

TEST(OverlapTest, PinkOverlapsPinkMoreThanDisjointBand) {
  const auto obs = pool(SynthKind::kPinkNoise, 12, 5);
  const auto pink = pool(SynthKind::kPinkNoise, 12, 6);
  const auto band = pool(SynthKind::kBandNoise, 12, 7, 6000.0, 8000.0);
  const auto white = pool(SynthKind::kWhiteNoise, 12, 8);
  const double s_pink = noise_overlap(pink, obs);
  const double s_band = noise_overlap(band, obs);
  EXPECT_GT(s_pink, s_band);
  EXPECT_GT(noise_overlap(white, obs), s_band);
}

TEST(OverlapTest, ScoreFromStats) {
  std::vector<Eigen::VectorXd> a, b;
  for (int i = 0; i < 8; ++i) {
    a.push_back(Eigen::VectorXd::Constant(2, static_cast<double>(i)));
    b.push_back(Eigen::VectorXd::Constant(2, static_cast<double>(i) + 0.5));
  }
  const OverlapStats s = overlap_stats(a, b);
  // Nearest neighbors sit 0.5*sqrt(2) away in both directions.
  EXPECT_NEAR(s.distance, 0.5 * std::sqrt(2.0), 1e-12);
  // Within-pool gaps are k*sqrt(2), 28 per pool; the pooled median is 3*sqrt(2).
  EXPECT_NEAR(s.scale, 3.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.score, std::exp(-s.distance / s.scale), 1e-15);
}

TEST(OverlapTest, SmallPoolsAreRejected) {
  const auto small = pool(SynthKind::kWhiteNoise, 7, 9);
  const auto ok = pool(SynthKind::kWhiteNoise, 8, 10);
  EXPECT_THROW(noise_overlap(small, ok), std::invalid_argument);
  EXPECT_THROW(noise_overlap(ok, small), std::invalid_argument);
}

}  // namespace
}  // namespace selab
