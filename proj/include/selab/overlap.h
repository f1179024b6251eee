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

// Distribution overlap between two noise pools.
//
// Each clip is embedded as the per-band mean log energy over a mel-spaced
// triangular filterbank. For pools A and B,
//   d_AB = mean over a in A of min over b in B of |a - b|
//   d    = (d_AB + d_BA) / 2
//   s    = median of the within-pool pairwise distances of A and B together
//   score = exp(-d / s)
// so a pool scores exactly 1 against itself.

#ifndef SELAB_OVERLAP_H_
#define SELAB_OVERLAP_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "selab/signal.h"
#include "selab/stft.h"

namespace selab {

inline constexpr int kOverlapBands = 16;
inline constexpr std::size_t kMinOverlapPool = 8;

/// num_bands x num_bins triangular filters, mel-spaced on [0, rate/2].
Eigen::MatrixXd mel_filterbank(int num_bands, int num_bins, int sample_rate);

/// Mean over frames of log(band energy + 1e-10).
Eigen::VectorXd band_log_energy(const Waveform& w, int num_bands = kOverlapBands,
                                const StftParams& p = {});

struct OverlapStats {
  double score = 0.0;     // exp(-distance / scale)
  double distance = 0.0;  // symmetrized mean nearest-neighbor distance
  double scale = 0.0;     // pooled within-pool median pairwise distance
};

/// Throws std::invalid_argument for pools smaller than kMinOverlapPool.
OverlapStats overlap_stats(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b);

double overlap_score(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b);

/// Embeds both pools with band_log_energy and scores them.
double noise_overlap(std::span<const Waveform> a, std::span<const Waveform> b);

}  // namespace selab

#endif  // SELAB_OVERLAP_H_
