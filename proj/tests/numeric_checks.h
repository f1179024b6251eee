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


// Numerical property checks shared by the unit tests and the acceptance
// runner. Each returns the worst error it saw.

#ifndef SELAB_TESTS_NUMERIC_CHECKS_H_
#define SELAB_TESTS_NUMERIC_CHECKS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "selab/mixer.h"
#include "selab/model.h"
#include "selab/signal.h"
#include "selab/stft.h"
#include "test_util.h"

namespace selab::testing {

/// Worst relative L2 error of istft(stft(w)) over `count` seeded random
/// signals with lengths spread over [2048, 32000].
inline double worst_round_trip_error(int count, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const std::size_t n = 2048 + rng.index(32000 - 2048 + 1);
    const Waveform w = random_wave(n, derive_seed(seed, i));
    worst = std::max(worst, relative_error(istft(stft(w)), w));
  }
  return worst;
}

/// Worst relative mismatch of <istft(S), w> against <S, istft_adjoint(w)>.
inline double worst_adjoint_error(int count, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const StftParams p;
    const std::size_t n = 2048 + rng.index(16000);
    const Waveform w = random_wave(n, derive_seed(seed, i, 1));
    Spectrogram S = stft(w, p);
    for (Eigen::Index k = 0; k < S.bins.cols(); ++k) {
      for (Eigen::Index f = 0; f < S.bins.rows(); ++f) {
        S.bins(f, k) = {rng.normal(), rng.normal()};
      }
    }
    const double lhs = dot(istft(S), w);
    const double rhs = tf_inner(S.bins, istft_adjoint(w, p, n).bins);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  return worst;
}

/// Worst |re-measured SNR - target| in dB over seeded triples with
/// target SNR uniform in [-10, 20].
inline double worst_snr_error(int count, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const Waveform x = random_wave(1000 + rng.index(31000), derive_seed(seed, i, 1));
    const Waveform n = random_wave(500 + rng.index(40000), derive_seed(seed, i, 2),
                                   rng.uniform(0.01, 3.0));
    const double snr = rng.uniform(-10.0, 20.0);
    const Mixture m = mix_at_snr(x, n, SnrDb(snr), derive_seed(seed, i, 3));
    worst = std::max(worst, std::abs(measured_snr_db(x, m.scaled_noise) - snr));
  }
  return worst;
}

/// |a - b| / max(|a|, |b|), or 0 when both are below `floor`.
inline double relative_difference(double a, double b, double floor = 1e-10) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < floor ? 0.0 : std::abs(a - b) / scale;
}

struct GradientCheck {
  double worst_relative_error = 0.0;
  std::size_t parameters_checked = 0;
};

/// Tiny network for finite-difference checks: 9 bins (16-sample window),
/// one context frame, one hidden layer of 8. The output layer is rescaled
/// so the mask sits away from its initial near-identity point.
inline MaskNet tiny_net(Activation activation, std::uint64_t seed) {
  MaskNetConfig c;
  c.context_frames = 1;
  c.hidden_sizes = {8};
  c.input_bins = 9;
  c.activation = activation;
  MaskNet net = init(c, seed);
  net.layers.back().weight *= 30.0;
  Rng rng(derive_seed(seed, 1));
  for (auto& layer : net.layers) {
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] += rng.uniform(-0.3, 0.3);
  }
  return net;
}

/// Central differences with step `h` of the time-domain MSE loss through
/// stft, mask, istft, against backward(), at `samples` parameters spread
/// over every layer.
inline GradientCheck check_gradients(MaskNet net, std::size_t samples, std::uint64_t seed,
                                     double h = 1e-5) {
  const StftParams p{16, 4};
  const Waveform w = random_wave(160, derive_seed(seed, 2), 0.5);
  const Waveform target = random_wave(160, derive_seed(seed, 3), 0.5);
  const LossAndGradients lg = backward(net, w, target, p);
  const std::size_t total = net.parameter_count();
  Rng rng(derive_seed(seed, 4));
  GradientCheck out;
  for (std::size_t s = 0; s < samples; ++s) {
    // Stride through the flattened parameters so every layer is visited.
    const std::size_t idx = (s * total) / samples + rng.index(std::max<std::size_t>(1, total / samples));
    double& param = parameter_at(net, idx);
    const double saved = param;
    param = saved + h;
    const double up = loss(enhance(net, w, p), target);
    param = saved - h;
    const double down = loss(enhance(net, w, p), target);
    param = saved;
    const double fd = (up - down) / (2.0 * h);
    out.worst_relative_error =
        std::max(out.worst_relative_error, relative_difference(fd, gradient_at(lg.grads, idx)));
    ++out.parameters_checked;
  }
  return out;
}

}  // namespace selab::testing

#endif  // SELAB_TESTS_NUMERIC_CHECKS_H_
