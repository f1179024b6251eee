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

#ifndef SELAB_METRICS_H_
#define SELAB_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include "selab/signal.h"
#include "selab/stft.h"

namespace selab {

/// SI-SDR values are clamped to [-kSiSdrCap, +kSiSdrCap] dB.
inline constexpr double kSiSdrCap = 60.0;

/// Scale-invariant SDR in dB:
///   alpha = <est, ref> / ||ref||^2
///   10 log10(||alpha ref||^2 / ||alpha ref - est||^2)
/// Throws std::domain_error for a silent reference; a silent estimate
/// scores -kSiSdrCap.
double si_sdr(const Waveform& est, const Waveform& ref);

/// si_sdr(est, ref) - si_sdr(noisy_input, ref).
double si_sdr_improvement(const Waveform& est, const Waveform& noisy_input,
                          const Waveform& ref);

/// Mean over frames of the RMS (over bins) of
/// 20 log10((|EST| + 1e-8) / (|REF| + 1e-8)). A proxy quality score in dB;
/// not PESQ.
double log_spectral_distance(const Waveform& est, const Waveform& ref,
                             const StftParams& p = {});

struct ColumnStats {
  double mean = 0.0;
  double median = 0.0;    // lower-middle element for even counts
  double variance = 0.0;  // population variance
};

ColumnStats aggregate(std::span<const double> values);

struct UtteranceScore {
  std::string utt_id;
  double si_sdr_in = 0.0;
  double si_sdr_out = 0.0;
  double si_sdri = 0.0;
  double lsd = 0.0;
};

UtteranceScore score_utterance(std::string utt_id, const Waveform& enhanced,
                               const Waveform& noisy_input, const Waveform& ref,
                               const StftParams& p = {});

struct MetricsReport {
  std::string method;
  std::vector<UtteranceScore> records;
  ColumnStats si_sdr_in, si_sdr_out, si_sdri, lsd;
};

/// Fills every ColumnStats from the records. Throws on an empty record set.
MetricsReport make_report(std::string method, std::vector<UtteranceScore> records);

}  // namespace selab

#endif  // SELAB_METRICS_H_
