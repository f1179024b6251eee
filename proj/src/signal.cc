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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fft.h"

namespace selab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPeak = 0.5;

void require_same_shape(const Waveform& a, const Waveform& b,
                        const char* what) {
  if (a.size() != b.size() || a.sample_rate() != b.sample_rate()) {
    throw std::invalid_argument(std::string(what) +
                                ": waveforms differ in length or rate");
  }
}

void peak_normalize(std::vector<double>& x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return;
  const double g = kPeak / peak;
  for (double& v : x) v *= g;
}

std::size_t length_for(double duration_s, int sample_rate) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw std::invalid_argument("synth: duration must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  if (n == 0) throw std::invalid_argument("synth: duration shorter than one sample");
  return n;
}

std::vector<double> white(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

// Paul Kellet's refined 1/f filter bank applied to uniform white noise.
std::vector<double> pink(std::size_t n, Rng& rng) {
  constexpr std::size_t kWarmup = 4096;
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n + kWarmup; ++i) {
    const double w = rng.uniform(-1.0, 1.0);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    const double p = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
    if (i >= kWarmup) x[i - kWarmup] = p;
  }
  return x;
}

std::vector<double> band(std::size_t n, int sample_rate, double lo_hz,
                         double hi_hz, Rng& rng) {
  std::vector<double> x = white(n, rng);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  internal::rfft(x, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    if (f < lo_hz || f > hi_hz) spec[k] = 0.0;
  }
  internal::irfft(spec, x);
  return x;
}

// Splits `total` into `parts` positive integer lengths with random
// proportions in [0.5, 1.5].
std::vector<std::size_t> random_partition(std::size_t total, int parts,
                                          Rng& rng) {
  std::vector<double> w(parts);
  double sum = 0.0;
  for (double& v : w) sum += (v = rng.uniform(0.5, 1.5));
  std::vector<std::size_t> out(parts);
  std::size_t used = 0;
  for (int i = 0; i < parts; ++i) {
    out[i] = (i + 1 == parts)
                 ? total - used
                 : static_cast<std::size_t>(std::floor(total * w[i] / sum));
    used += out[i];
  }
  return out;
}

// Voicing gate: 2-4 silent gaps that together cover 20% of the signal, with
// 8 ms raised-cosine ramps at each voiced-segment edge.
std::vector<double> voicing_gate(std::size_t n, int sample_rate, Rng& rng) {
  std::vector<double> gate(n, 1.0);
  const int gaps = 2 + static_cast<int>(rng.index(3));
  const auto silent = static_cast<std::size_t>(std::llround(0.2 * n));
  if (silent == 0 || silent >= n) return gate;
  const auto gap_len = random_partition(silent, gaps, rng);
  const auto voiced_len = random_partition(n - silent, gaps + 1, rng);

  std::size_t pos = 0;
  for (int g = 0; g < gaps; ++g) {
    pos += voiced_len[g];
    for (std::size_t i = 0; i < gap_len[g] && pos + i < n; ++i) gate[pos + i] = 0.0;
    pos += gap_len[g];
  }
  const auto ramp = static_cast<std::size_t>(0.008 * sample_rate);
  if (ramp < 2) return gate;
  // Smooth every 0->1 and 1->0 transition in place.
  std::vector<double> smooth = gate;
  for (std::size_t i = 1; i < n; ++i) {
    if (gate[i] == gate[i - 1]) continue;
    const bool rising = gate[i] > gate[i - 1];
    for (std::size_t j = 0; j < ramp; ++j) {
      const double r = 0.5 - 0.5 * std::cos(std::numbers::pi * (j + 0.5) / ramp);
      if (rising && i + j < n && gate[i + j] > 0.0) smooth[i + j] = std::min(smooth[i + j], r);
      if (!rising && i >= j + 1 && gate[i - j - 1] > 0.0) {
        smooth[i - j - 1] = std::min(smooth[i - j - 1], r);
      }
    }
  }
  return smooth;
}

// Harmonic source with a drifting fundamental (90-250 Hz), three slowly
// moving formant resonances, a syllabic amplitude modulation and silent gaps.
std::vector<double> speech_like(std::size_t n, int sample_rate, Rng& rng) {
  const double fs = sample_rate;
  const double f0_base = rng.uniform(110.0, 220.0);
  const double vib_rate = rng.uniform(0.4, 1.0);
  const double vib_phase = rng.uniform(0.0, kTwoPi);
  const double jit_rate = rng.uniform(1.5, 3.0);
  const double jit_phase = rng.uniform(0.0, kTwoPi);
  const double syl_rate = rng.uniform(3.0, 6.0);
  const double syl_phase = rng.uniform(0.0, kTwoPi);
  double formant_rate[3], formant_phase[3];
  for (int i = 0; i < 3; ++i) {
    formant_rate[i] = rng.uniform(0.6, 2.0);
    formant_phase[i] = rng.uniform(0.0, kTwoPi);
  }
  const double formant_center[3] = {550.0, 1600.0, 2700.0};
  const double formant_swing[3] = {250.0, 600.0, 300.0};
  const double formant_bw[3] = {120.0, 180.0, 260.0};
  const double formant_gain[3] = {1.0, 0.6, 0.35};

  const std::vector<double> gate = voicing_gate(n, sample_rate, rng);
  const double max_freq = std::min(7800.0, 0.475 * fs);
  const int max_harmonics = static_cast<int>(max_freq / 90.0) + 1;

  std::vector<double> out(n, 0.0);
  std::vector<double> amp(max_harmonics + 1, 0.0);
  constexpr std::size_t kBlock = 32;
  double phase = rng.uniform(0.0, kTwoPi);
  double f0 = f0_base;
  double formants[3];
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    if (i % kBlock == 0) {
      f0 = f0_base * (1.0 + 0.15 * std::sin(kTwoPi * vib_rate * t + vib_phase) +
                      0.05 * std::sin(kTwoPi * jit_rate * t + jit_phase));
      f0 = std::clamp(f0, 90.0, 250.0);
      for (int k = 0; k < 3; ++k) {
        formants[k] = formant_center[k] +
                      formant_swing[k] *
                          std::sin(kTwoPi * formant_rate[k] * t + formant_phase[k]);
      }
      for (int h = 1; h <= max_harmonics; ++h) {
        const double fh = h * f0;
        if (fh >= max_freq) {
          amp[h] = 0.0;
          continue;
        }
        double a = 0.08 / (1.0 + fh / 1000.0);
        for (int k = 0; k < 3; ++k) {
          const double d = (fh - formants[k]) / formant_bw[k];
          a += formant_gain[k] * std::exp(-0.5 * d * d);
        }
        amp[h] = a;
      }
    }
    phase += kTwoPi * f0 / fs;
    if (phase > kTwoPi) phase -= kTwoPi;
    // e^{i h phase} by repeated rotation.
    const std::complex<double> step(std::cos(phase), std::sin(phase));
    std::complex<double> rot = step;
    double acc = 0.0;
    for (int h = 1; h <= max_harmonics; ++h) {
      if (amp[h] != 0.0) acc += amp[h] * rot.imag();
      rot *= step;
    }
    const double env = 0.55 + 0.45 * std::sin(kTwoPi * syl_rate * t + syl_phase);
    out[i] = acc * env * gate[i];
  }
  return out;
}

std::vector<double> synth_samples(const SynthSpec& spec, int sample_rate) {
  const std::size_t n = length_for(spec.duration_s, sample_rate);
  Rng rng(spec.seed);
  switch (spec.kind) {
    case SynthKind::kWhiteNoise:
      return white(n, rng);
    case SynthKind::kPinkNoise:
      return pink(n, rng);
    case SynthKind::kBandNoise:
      if (!(spec.lo_hz >= 0.0 && spec.lo_hz < spec.hi_hz &&
            spec.hi_hz <= sample_rate / 2.0)) {
        throw std::invalid_argument(
            "synth: band_noise needs 0 <= lo_hz < hi_hz <= sample_rate/2");
      }
      return band(n, sample_rate, spec.lo_hz, spec.hi_hz, rng);
    case SynthKind::kSpeechLike:
      return speech_like(n, sample_rate, rng);
    case SynthKind::kBabbleLike: {
      constexpr int kTalkers = 6;
      std::vector<double> sum(n, 0.0);
      for (int k = 0; k < kTalkers; ++k) {
        Rng talker(derive_seed(spec.seed, 0xBABB1E, k));
        std::vector<double> s = speech_like(n, sample_rate, talker);
        peak_normalize(s);
        for (std::size_t i = 0; i < n; ++i) sum[i] += s[i];
      }
      return sum;
    }
  }
  throw std::invalid_argument("synth: unknown kind");
}

}  // namespace

Waveform::Waveform(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (samples_.empty()) throw std::invalid_argument("Waveform: empty signal");
  if (sample_rate_ <= 0) throw std::invalid_argument("Waveform: sample_rate must be positive");
  for (double v : samples_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Waveform: non-finite sample");
  }
}

Waveform Waveform::Zeros(std::size_t length, int sample_rate) {
  return Waveform(std::vector<double>(length, 0.0), sample_rate);
}

double mean_power(const Waveform& w) {
  double acc = 0.0;
  for (double v : w.samples()) acc += v * v;
  return acc / static_cast<double>(w.size());
}

Waveform add(const Waveform& a, const Waveform& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Waveform(std::move(out), a.sample_rate());
}

Waveform subtract(const Waveform& a, const Waveform& b) {
  require_same_shape(a, b, "subtract");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return Waveform(std::move(out), a.sample_rate());
}

Waveform scale(const Waveform& w, double factor) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * w[i];
  return Waveform(std::move(out), w.sample_rate());
}

double dot(const Waveform& a, const Waveform& b) {
  require_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kSpeechLike: return "speech_like";
    case SynthKind::kWhiteNoise: return "white_noise";
    case SynthKind::kPinkNoise: return "pink_noise";
    case SynthKind::kBandNoise: return "band_noise";
    case SynthKind::kBabbleLike: return "babble_like";
  }
  return "unknown";
}

SynthKind synth_kind_from_string(std::string_view name) {
  for (SynthKind k : {SynthKind::kSpeechLike, SynthKind::kWhiteNoise,
                      SynthKind::kPinkNoise, SynthKind::kBandNoise,
                      SynthKind::kBabbleLike}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown synth kind: " + std::string(name));
}

Waveform synth(const SynthSpec& spec, int sample_rate) {
  if (sample_rate <= 0) throw std::invalid_argument("synth: sample_rate must be positive");
  std::vector<double> x = synth_samples(spec, sample_rate);
  peak_normalize(x);
  return Waveform(std::move(x), sample_rate);
}

double out_of_band_energy_fraction(const Waveform& w, double lo_hz,
                                   double hi_hz) {
  const std::size_t n = w.size();
  std::vector<std::complex<double>> spec(n / 2 + 1);
  internal::rfft(w.samples(), spec);
  double in = 0.0, out = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    // Interior bins stand for a conjugate pair.
    const bool single = (k == 0) || (n % 2 == 0 && k == n / 2);
    const double e = std::norm(spec[k]) * (single ? 1.0 : 2.0);
    const double f = static_cast<double>(k) * w.sample_rate() / static_cast<double>(n);
    (f >= lo_hz && f <= hi_hz ? in : out) += e;
  }
  const double total = in + out;
  return total > 0.0 ? out / total : 0.0;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  // splitmix64 finalizer folded over the labels.
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  h = mix(h ^ a);
  h = mix(h ^ b);
  h = mix(h ^ c);
  return h;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<std::size_t>(v % range);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace selab
