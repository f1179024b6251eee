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

// Short-time Fourier analysis/synthesis with a one-sided spectrum.
//
// Framing: the signal is padded by win_len/2 reflected samples on each side
// and cut into K = floor(T / hop) + 1 frames of win_len samples. Synthesis is
// weighted overlap-add with the analysis window, divided by the summed
// squared window (floored at 1e-12), then trimmed back to T samples. This
// makes istft(stft(x)) == x up to round-off whenever hop <= win_len / 2.
//
// Inner products on spectrograms weight interior bins by 2 and the DC and
// Nyquist bins by 1, so that istft_adjoint is the exact adjoint of istft
// under <S, A> = Re sum_{f,k} mult_f S(f,k) conj(A(f,k)).

#ifndef SELAB_STFT_H_
#define SELAB_STFT_H_

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <vector>

#include "selab/signal.h"

namespace selab {

enum class WindowKind { kHamming };

struct StftParams {
  int win_len = 512;
  int hop = 128;
  WindowKind window = WindowKind::kHamming;

  int fft_len() const { return win_len; }
  int bins() const { return win_len / 2 + 1; }
  /// Throws std::invalid_argument unless 0 < hop <= win_len and win_len is
  /// even and at least 2.
  void validate() const;

  bool operator==(const StftParams&) const = default;
};

/// Periodic Hamming window: 0.54 - 0.46 cos(2 pi n / N), n = 0..N-1.
std::vector<double> hamming_window(int n);

/// Number of frames for a signal of `orig_len` samples.
int frame_count(std::size_t orig_len, const StftParams& p);

/// Multiplicity of one-sided bin f: 1 for DC and Nyquist, 2 otherwise.
inline double bin_multiplicity(int f, int num_bins) {
  return (f == 0 || f == num_bins - 1) ? 1.0 : 2.0;
}

/// Complex F x K array, one column per frame.
struct Spectrogram {
  Eigen::MatrixXcd bins;
  StftParams params;
  std::size_t orig_len = 0;
  int sample_rate = kDefaultSampleRate;

  int num_bins() const { return static_cast<int>(bins.rows()); }
  int num_frames() const { return static_cast<int>(bins.cols()); }
};

/// Complex T-F multiplier with the same F x K shape as the spectrogram it
/// scales.
struct Mask {
  Eigen::MatrixXcd values;
};

Spectrogram stft(const Waveform& w, const StftParams& p = {});

/// Inverse STFT, trimmed to S.orig_len samples.
Waveform istft(const Spectrogram& S);

/// Bin-wise complex product m(f,k) * S(f,k).
Spectrogram apply_mask(const Spectrogram& S, const Mask& m);

/// ln(|S(f,k)| + eps).
Eigen::MatrixXd log_magnitude(const Spectrogram& S, double eps = 1e-8);

/// Adjoint of istft for a forward pass over `orig_len` samples. Throws if
/// w.size() != orig_len.
Spectrogram istft_adjoint(const Waveform& w, const StftParams& p,
                          std::size_t orig_len);
/// Same, taking orig_len from w.
Spectrogram istft_adjoint(const Waveform& w, const StftParams& p = {});

/// Re sum_{f,k} mult_f a(f,k) conj(b(f,k)).
double tf_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace selab

#endif  // SELAB_STFT_H_
