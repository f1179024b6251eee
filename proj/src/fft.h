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

// Thin real-FFT wrapper over FFTW. Plans and aligned buffers are cached per
// transform length and per thread; planning itself is serialized.

#ifndef SELAB_SRC_FFT_H_
#define SELAB_SRC_FFT_H_

#include <complex>
#include <span>

namespace selab::internal {

/// Forward real DFT of length in.size(): out[k] = sum_t in[t] e^{-2 pi i k t/N},
/// k = 0..N/2.
void rfft(std::span<const double> in, std::span<std::complex<double>> out);

/// Unnormalized inverse of rfft: out[t] = sum over the Hermitian extension of
/// in, so irfft(rfft(x)) = N * x. Imaginary parts of the DC and (even N)
/// Nyquist bins are ignored.
void irfft(std::span<const std::complex<double>> in, std::span<double> out);

}  // namespace selab::internal

#endif  // SELAB_SRC_FFT_H_
