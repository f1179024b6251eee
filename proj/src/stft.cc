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

#include "selab/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "fft.h"

namespace selab {
namespace {

constexpr double kDivisorFloor = 1e-12;

std::vector<double> window_for(const StftParams& p) {
  switch (p.window) {
    case WindowKind::kHamming:
      return hamming_window(p.win_len);
  }
  throw std::invalid_argument("unknown window");
}

std::size_t padded_length(std::size_t orig_len, const StftParams& p) {
  return orig_len + static_cast<std::size_t>(p.win_len);
}

// Summed squared window over the padded timeline, floored.
std::vector<double> overlap_divisor(std::size_t orig_len, const StftParams& p,
                                    const std::vector<double>& win) {
  const int frames = frame_count(orig_len, p);
  std::vector<double> d(padded_length(orig_len, p), 0.0);
  for (int k = 0; k < frames; ++k) {
    const std::size_t start = static_cast<std::size_t>(k) * p.hop;
    for (int t = 0; t < p.win_len; ++t) d[start + t] += win[t] * win[t];
  }
  for (double& v : d) v = std::max(v, kDivisorFloor);
  return d;
}

void require_framable(std::size_t orig_len, const StftParams& p) {
  if (orig_len < static_cast<std::size_t>(p.win_len / 2 + 1)) {
    throw std::invalid_argument(
        "stft: signal of " + std::to_string(orig_len) +
        " samples is too short for reflect padding of " +
        std::to_string(p.win_len / 2));
  }
}

}  // namespace

void StftParams::validate() const {
  if (win_len < 2 || win_len % 2 != 0) {
    throw std::invalid_argument("StftParams: win_len must be even and >= 2");
  }
  if (hop <= 0 || hop > win_len) {
    throw std::invalid_argument("StftParams: need 0 < hop <= win_len");
  }
}

std::vector<double> hamming_window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

int frame_count(std::size_t orig_len, const StftParams& p) {
  return static_cast<int>((padded_length(orig_len, p) - p.win_len) / p.hop) + 1;
}

Spectrogram stft(const Waveform& w, const StftParams& p) {
  p.validate();
  const std::size_t n = w.size();
  require_framable(n, p);
  const int half = p.win_len / 2;
  const std::size_t padded_len = padded_length(n, p);
  std::vector<double> padded(padded_len);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  for (std::size_t i = 0; i < padded_len; ++i) {
    std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) - half;
    if (idx < 0) idx = -idx;
    if (idx > last) idx = 2 * last - idx;
    padded[i] = w[static_cast<std::size_t>(idx)];
  }

  const std::vector<double> win = window_for(p);
  const int frames = frame_count(n, p);
  Spectrogram S;
  S.params = p;
  S.orig_len = n;
  S.sample_rate = w.sample_rate();
  S.bins.resize(p.bins(), frames);
  std::vector<double> frame(p.win_len);
  std::vector<std::complex<double>> spec(p.bins());
  for (int k = 0; k < frames; ++k) {
    const std::size_t start = static_cast<std::size_t>(k) * p.hop;
    for (int t = 0; t < p.win_len; ++t) frame[t] = padded[start + t] * win[t];
    internal::rfft(frame, spec);
    for (int f = 0; f < p.bins(); ++f) S.bins(f, k) = spec[f];
  }
  return S;
}

Waveform istft(const Spectrogram& S) {
  const StftParams& p = S.params;
  p.validate();
  if (S.num_bins() != p.bins() || S.num_frames() != frame_count(S.orig_len, p)) {
    throw std::invalid_argument("istft: spectrogram shape does not match its params");
  }
  const std::vector<double> win = window_for(p);
  const std::vector<double> divisor = overlap_divisor(S.orig_len, p, win);
  std::vector<double> acc(padded_length(S.orig_len, p), 0.0);
  std::vector<double> frame(p.win_len);
  std::vector<std::complex<double>> spec(p.bins());
  const double inv_n = 1.0 / p.fft_len();
  for (int k = 0; k < S.num_frames(); ++k) {
    for (int f = 0; f < p.bins(); ++f) spec[f] = S.bins(f, k);
    internal::irfft(spec, frame);
    const std::size_t start = static_cast<std::size_t>(k) * p.hop;
    for (int t = 0; t < p.win_len; ++t) acc[start + t] += frame[t] * inv_n * win[t];
  }
  const std::size_t half = p.win_len / 2;
  std::vector<double> out(S.orig_len);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc[i + half] / divisor[i + half];
  return Waveform(std::move(out), S.sample_rate);
}

Spectrogram apply_mask(const Spectrogram& S, const Mask& m) {
  if (m.values.rows() != S.bins.rows() || m.values.cols() != S.bins.cols()) {
    throw std::invalid_argument("apply_mask: mask shape does not match spectrogram");
  }
  Spectrogram out = S;
  out.bins = m.values.cwiseProduct(S.bins);
  return out;
}

Eigen::MatrixXd log_magnitude(const Spectrogram& S, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("log_magnitude: eps must be positive");
  return (S.bins.cwiseAbs().array() + eps).log().matrix();
}

Spectrogram istft_adjoint(const Waveform& w, const StftParams& p,
                          std::size_t orig_len) {
  p.validate();
  if (w.size() != orig_len) {
    throw std::invalid_argument("istft_adjoint: waveform has " +
                                std::to_string(w.size()) + " samples, forward pass had " +
                                std::to_string(orig_len));
  }
  require_framable(orig_len, p);
  const std::vector<double> win = window_for(p);
  const std::vector<double> divisor = overlap_divisor(orig_len, p, win);
  const std::size_t half = p.win_len / 2;
  std::vector<double> spread(padded_length(orig_len, p), 0.0);
  for (std::size_t i = 0; i < orig_len; ++i) spread[i + half] = w[i] / divisor[i + half];

  const int frames = frame_count(orig_len, p);
  Spectrogram A;
  A.params = p;
  A.orig_len = orig_len;
  A.sample_rate = w.sample_rate();
  A.bins.resize(p.bins(), frames);
  std::vector<double> frame(p.win_len);
  std::vector<std::complex<double>> spec(p.bins());
  const double inv_n = 1.0 / p.fft_len();
  for (int k = 0; k < frames; ++k) {
    const std::size_t start = static_cast<std::size_t>(k) * p.hop;
    for (int t = 0; t < p.win_len; ++t) frame[t] = spread[start + t] * win[t];
    internal::rfft(frame, spec);
    for (int f = 0; f < p.bins(); ++f) A.bins(f, k) = spec[f] * inv_n;
  }
  return A;
}

Spectrogram istft_adjoint(const Waveform& w, const StftParams& p) {
  return istft_adjoint(w, p, w.size());
}

double tf_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("tf_inner: shape mismatch");
  }
  const int bins = static_cast<int>(a.rows());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    for (int f = 0; f < bins; ++f) {
      acc += bin_multiplicity(f, bins) * (a(f, k) * std::conj(b(f, k))).real();
    }
  }
  return acc;
}

}  // namespace selab
