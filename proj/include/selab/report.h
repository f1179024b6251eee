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

// CSV and JSON reports. Schemas:
//   metrics   utt_id,method,si_sdr_in,si_sdr_out,si_sdri,lsd
//             one row per utterance, then mean/median/variance footer rows
//             per method with utt_id "__mean__", "__median__", "__variance__"
//   sweep     point_label,si_sdri_mean,si_sdri_median,si_sdri_var
//   overlap   family,overlap_score
//   embedding pool,clip_id,band_00..band_15
// SI-SDR values are capped at +-60 dB. LSD is a log-spectral distance in dB,
// reported as a proxy quality score. Every JSON file mirrors its CSV tables
// and carries the full config and master seed. Writing is idempotent.

#ifndef SELAB_REPORT_H_
#define SELAB_REPORT_H_

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "selab/config.h"
#include "selab/experiments.h"
#include "selab/metrics.h"

namespace selab {

void write_metrics_csv(std::ostream& os, std::span<const MetricsReport> reports);
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);
void write_overlap_csv(std::ostream& os, std::span<const OverlapRow> rows);
void write_embeddings_csv(std::ostream& os, std::span<const EmbeddingRow> rows);

/// JSON object text: {"config": {...}, "seed": ..., "tables": {...}}.
std::string metrics_json(const LabConfig& config, std::span<const MetricsReport> reports);

/// Parses the "config" member of a report JSON back into a LabConfig.
LabConfig config_from_report_json(const std::string& json_text);

/// Each emitter writes its files into dir (created if missing) and returns
/// the paths written.
std::vector<std::filesystem::path> emit_metrics_report(const LabConfig& config,
                                                       std::span<const MetricsReport> reports,
                                                       const std::filesystem::path& dir,
                                                       const std::string& stem);
std::vector<std::filesystem::path> emit_poc_report(const LabConfig& config,
                                                   const PocResult& result,
                                                   const std::filesystem::path& dir);
std::vector<std::filesystem::path> emit_snr_sweep_report(const LabConfig& config,
                                                         const SweepResult& result,
                                                         const std::filesystem::path& dir);
std::vector<std::filesystem::path> emit_noise_sweep_report(const LabConfig& config,
                                                           const NoiseSweepResult& result,
                                                           const std::filesystem::path& dir);

}  // namespace selab

#endif  // SELAB_REPORT_H_
