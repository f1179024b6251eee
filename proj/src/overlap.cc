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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace selab {
namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double mean_nearest(std::span<const Eigen::VectorXd> from, std::span<const Eigen::VectorXd> to) {
  double sum = 0.0;
  for (const auto& x : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : to) best = std::min(best, (x - y).norm());
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

void pairwise(std::span<const Eigen::VectorXd> pool, std::vector<double>& out) {
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) out.push_back((pool[i] - pool[j]).norm());
  }
}

}  // namespace

Eigen::MatrixXd mel_filterbank(int num_bands, int num_bins, int sample_rate) {
  if (num_bands < 1 || num_bins < 2 || sample_rate <= 0) {
    throw std::invalid_argument("mel_filterbank: bad dimensions");
  }
  const double nyquist = sample_rate / 2.0;
  const double top = hz_to_mel(nyquist);
  std::vector<double> edges(num_bands + 2);
  for (int i = 0; i < num_bands + 2; ++i) edges[i] = mel_to_hz(top * i / (num_bands + 1));

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(num_bands, num_bins);
  const double bin_hz = nyquist / (num_bins - 1);
  for (int b = 0; b < num_bands; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    for (int f = 0; f < num_bins; ++f) {
      const double hz = f * bin_hz;
      if (hz > lo && hz < hi) fb(b, f) = hz <= mid ? (hz - lo) / (mid - lo) : (hi - hz) / (hi - mid);
    }
    // Narrow low bands can fall between bins; give them the nearest bin.
    if (fb.row(b).sum() == 0.0) {
      fb(b, std::clamp(static_cast<int>(std::lround(mid / bin_hz)), 0, num_bins - 1)) = 1.0;
    }
  }
  return fb;
}

Eigen::VectorXd band_log_energy(const Waveform& w, int num_bands, const StftParams& p) {
  const Spectrogram S = stft(w, p);
  const Eigen::MatrixXd power = S.bins.cwiseAbs2();
  const Eigen::MatrixXd fb = mel_filterbank(num_bands, S.num_bins(), w.sample_rate());
  const Eigen::MatrixXd bands = fb * power;
  return (bands.array() + 1e-10).log().rowwise().mean();
}

OverlapStats overlap_stats(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b) {
  if (a.size() < kMinOverlapPool || b.size() < kMinOverlapPool) {
    throw std::invalid_argument("overlap_score: each pool needs at least " +
                                std::to_string(kMinOverlapPool) + " clips");
  }
  OverlapStats s;
  s.distance = 0.5 * (mean_nearest(a, b) + mean_nearest(b, a));
  std::vector<double> within;
  pairwise(a, within);
  pairwise(b, within);
  std::sort(within.begin(), within.end());
  s.scale = within[(within.size() - 1) / 2];
  if (s.distance == 0.0) {
    s.score = 1.0;
  } else {
    s.score = s.scale > 0.0 ? std::exp(-s.distance / s.scale) : 0.0;
  }
  return s;
}

double overlap_score(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b) {
  return overlap_stats(a, b).score;
}

double noise_overlap(std::span<const Waveform> a, std::span<const Waveform> b) {
  std::vector<Eigen::VectorXd> ea, eb;
  for (const auto& w : a) ea.push_back(band_log_energy(w));
  for (const auto& w : b) eb.push_back(band_log_energy(w));
  return overlap_score(ea, eb);
}

}  // namespace selab
