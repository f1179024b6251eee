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


// Small helpers shared by the unit tests.

#ifndef SELAB_TESTS_TEST_UTIL_H_
#define SELAB_TESTS_TEST_UTIL_H_

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "selab/signal.h"

namespace selab::testing {

/// Seeded i.i.d. normal samples.
inline Waveform random_wave(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = sigma * rng.normal();
  return Waveform(std::move(x));
}

inline double norm2(const Waveform& w) { return std::sqrt(dot(w, w)); }

/// ||a - b|| / ||b||.
inline double relative_error(const Waveform& a, const Waveform& b) {
  return norm2(subtract(a, b)) / norm2(b);
}

/// Textbook O(N^2) DFT bin k of x, kept independent of the library FFT.
inline std::complex<double> naive_dft_bin(const std::vector<double>& x, std::size_t k) {
  const double n = static_cast<double>(x.size());
  std::complex<double> acc = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double phase = -2.0 * M_PI * static_cast<double>((k * t) % x.size()) / n;
    acc += x[t] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc;
}

/// SNR of signal vs noise in dB, straight from the sample sums.
inline double measured_snr_db(const Waveform& signal, const Waveform& noise) {
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < signal.size(); ++i) ps += signal[i] * signal[i];
  for (std::size_t i = 0; i < noise.size(); ++i) pn += noise[i] * noise[i];
  return 10.0 * std::log10((ps / signal.size()) / (pn / noise.size()));
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("selab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace selab::testing

#endif  // SELAB_TESTS_TEST_UTIL_H_
