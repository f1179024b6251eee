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

// Lab configuration: an INI file with [corpus], [train] and [experiment]
// sections. Every key has a default; unknown sections or keys are rejected.
// The same key table drives parsing, INI output and the JSON echo in
// reports, so an echoed config parses back to an equal LabConfig.

#ifndef SELAB_CONFIG_H_
#define SELAB_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "selab/mixer.h"
#include "selab/trainer.h"

namespace selab {

enum class Experiment { kProofOfConcept, kSnrSweep, kNoiseSweep };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

struct CorpusConfig {
  std::string manifest;  // load this manifest instead of synthesizing
  int sample_rate = kDefaultSampleRate;
  double duration_s = 2.0;
  int train_count = 200;
  int val_count = 10;
  int test_count = 50;
  int train_count_multiplier = 1;  // extra noisy-only utterances for NyTT
  int noise_pool_size = 24;
  SnrSpec obs_snr = SnrSpec::Discrete({5.0, 10.0, 15.0});
  SnrSpec test_snr = SnrSpec::Discrete({-5.0, 0.0, 5.0, 10.0});
  SnrSpec noise_test_snr = SnrSpec::Discrete({0.0, 5.0, 10.0, 15.0});
  double disjoint_lo_hz = 6000.0;
  double disjoint_hi_hz = 8000.0;
  double heldout_lo_hz = 100.0;
  double heldout_hi_hz = 7000.0;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::kProofOfConcept;
  std::uint64_t seed = 0;
  std::vector<std::string> poc_noises = {"pink", "babble", "white"};
  std::vector<std::string> sweep_snrs = {"-5", "0", "5", "10", "15", "20", "inf"};
  std::string sweep_noise = "pink";
  std::vector<std::string> noise_families = {"pink", "babble", "white", "band"};
};

struct LabConfig {
  CorpusConfig corpus;
  TrainConfig train;
  ExperimentConfig experiment;

  /// Cross-field checks (e.g. band edges against the sample rate).
  void validate() const;
};

/// Equal when every key renders to the same text.
bool operator==(const LabConfig& a, const LabConfig& b);

/// Sets one key. Throws std::invalid_argument naming section and key for
/// unknown keys or unparsable values.
void apply_setting(LabConfig& config, const std::string& section,
                   const std::string& key, const std::string& value);

/// section -> key -> value text, for every key.
using SettingMap = std::map<std::string, std::map<std::string, std::string>>;
SettingMap settings_of(const LabConfig& config);

LabConfig parse_config(const std::string& ini_text);
LabConfig load_config(const std::filesystem::path& path);
LabConfig config_from_settings(const SettingMap& settings);
std::string to_ini(const LabConfig& config);

}  // namespace selab

#endif  // SELAB_CONFIG_H_
