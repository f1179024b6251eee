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

// Lab corpora: synthetic speech, noise pools per family, and a noisy
// training corpus built from observation noise. A corpus lives in memory as
// a LabCorpus and on disk as WAV files plus a JSON manifest.
//
// Noise pools are keyed by name:
//   pink, babble, white   overlapping training families
//   band                  disjoint band (default 6-8 kHz)
//   heldout               never offered to training; mismatched tests
//   obs                   observation noise inside the noisy corpus
//   val, test             noise for the validation and matched test sets

#ifndef SELAB_CORPUS_H_
#define SELAB_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selab/config.h"
#include "selab/signal.h"
#include "selab/trainer.h"

namespace selab {

enum class Role { kClean, kNoise, kNoisy };

std::string_view to_string(Role r);
Role role_from_string(std::string_view name);

struct ManifestEntry {
  std::string id;
  Role role = Role::kClean;
  std::string path;               // relative to the manifest directory
  std::optional<SynthSpec> synth;  // absent for recorded audio
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  std::string split;  // train, val, test
  std::string pool;   // noise pool name; empty for speech
  // Noisy entries: observation SNR and the clean source. The clean source
  // is an evaluation-only link that training code never follows.
  std::optional<double> obs_snr_db;
  std::string eval_only_reference;

  bool operator==(const ManifestEntry&) const = default;
};

struct CorpusManifest {
  int sample_rate = kDefaultSampleRate;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;

  /// Unique ids; noisy entries carry an observation SNR.
  void validate() const;
  std::string to_json() const;
  static CorpusManifest FromJson(const std::string& text);

  bool operator==(const CorpusManifest&) const = default;
};

struct LabCorpus {
  int sample_rate = kDefaultSampleRate;
  std::vector<Utterance> train_clean;
  std::vector<Utterance> train_noisy;  // x = s + n_obs; no clean field
  std::vector<Utterance> val_clean;
  std::vector<Utterance> test_clean;
  std::map<std::string, std::vector<Utterance>> noise;
  CorpusManifest manifest;

  /// Throws std::invalid_argument naming the pool if it is missing.
  const std::vector<Utterance>& pool(const std::string& name) const;
};

/// SynthSpec for a noise family name (pink, babble, white, band, heldout).
SynthSpec family_spec(const std::string& family, const CorpusConfig& c,
                      std::uint64_t seed);

/// Deterministic in (config, seed).
LabCorpus build_corpus(const CorpusConfig& config, std::uint64_t seed);

/// WAVs (float32) under dir plus dir/manifest.json. Overwrites.
void write_corpus(const LabCorpus& corpus, const std::filesystem::path& dir);

/// Reads a manifest and its WAVs.
LabCorpus load_corpus(const std::filesystem::path& manifest_path);

/// build_corpus, or load_corpus when config.manifest is set.
LabCorpus obtain_corpus(const CorpusConfig& config, std::uint64_t seed);

/// Mixes every clean utterance with one noise clip from `pool` at a draw
/// from `snr`. The result has no clean decomposition.
NoisySpeechCorpus make_noisy_corpus(const std::vector<Utterance>& clean,
                                    const std::vector<Utterance>& pool,
                                    const SnrSpec& snr, std::uint64_t seed);

/// Evaluation items: clean[i] + noise clip i (cycled) at a draw from `snr`.
ValidationSet make_eval_set(const std::vector<Utterance>& clean,
                            const std::vector<Utterance>& pool,
                            const SnrSpec& snr, std::uint64_t seed);

}  // namespace selab

#endif  // SELAB_CORPUS_H_
