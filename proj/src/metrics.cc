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

#include "selab/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selab {

double si_sdr(const Waveform& est, const Waveform& ref) {
  if (est.size() != ref.size()) throw std::invalid_argument("si_sdr: length mismatch");
  const double ref_energy = dot(ref, ref);
  if (!(ref_energy > 0.0)) throw std::domain_error("si_sdr: silent reference");
  const double est_energy = dot(est, est);
  if (est_energy == 0.0) return -kSiSdrCap;

  const double alpha = dot(est, ref) / ref_energy;
  double target = 0.0, error = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double t = alpha * ref[i];
    const double e = t - est[i];
    target += t * t;
    error += e * e;
  }
  if (error == 0.0) return kSiSdrCap;
  if (target == 0.0) return -kSiSdrCap;
  return std::clamp(10.0 * std::log10(target / error), -kSiSdrCap, kSiSdrCap);
}

double si_sdr_improvement(const Waveform& est, const Waveform& noisy_input,
                          const Waveform& ref) {
  return si_sdr(est, ref) - si_sdr(noisy_input, ref);
}

double log_spectral_distance(const Waveform& est, const Waveform& ref,
                             const StftParams& p) {
  if (est.size() != ref.size()) {
    throw std::invalid_argument("log_spectral_distance: length mismatch");
  }
  constexpr double kEps = 1e-8;
  const Spectrogram e = stft(est, p);
  const Spectrogram r = stft(ref, p);
  const Eigen::ArrayXXd ratio_db =
      20.0 * ((e.bins.cwiseAbs().array() + kEps) / (r.bins.cwiseAbs().array() + kEps)).log10();
  const Eigen::ArrayXd per_frame = ratio_db.square().colwise().mean().sqrt().transpose();
  return per_frame.mean();
}

ColumnStats aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate: no records");
  ColumnStats s;
  const double n = static_cast<double>(values.size());
  // Sum in sorted order so the result does not depend on record order.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / n;
  double sq = 0.0;
  for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
  s.variance = sq / n;
  s.median = sorted[(sorted.size() - 1) / 2];
  return s;
}

UtteranceScore score_utterance(std::string utt_id, const Waveform& enhanced,
                               const Waveform& noisy_input, const Waveform& ref,
                               const StftParams& p) {
  UtteranceScore u;
  u.utt_id = std::move(utt_id);
  u.si_sdr_in = si_sdr(noisy_input, ref);
  u.si_sdr_out = si_sdr(enhanced, ref);
  u.si_sdri = u.si_sdr_out - u.si_sdr_in;
  u.lsd = log_spectral_distance(enhanced, ref, p);
  return u;
}

MetricsReport make_report(std::string method, std::vector<UtteranceScore> records) {
  if (records.empty()) throw std::invalid_argument("make_report: no records");
  MetricsReport r;
  r.method = std::move(method);
  r.records = std::move(records);
  auto column = [&](double UtteranceScore::*field) {
    std::vector<double> v;
    v.reserve(r.records.size());
    for (const auto& rec : r.records) v.push_back(rec.*field);
    return aggregate(v);
  };
  r.si_sdr_in = column(&UtteranceScore::si_sdr_in);
  r.si_sdr_out = column(&UtteranceScore::si_sdr_out);
  r.si_sdri = column(&UtteranceScore::si_sdri);
  r.lsd = column(&UtteranceScore::lsd);
  return r;
}

}  // namespace selab
