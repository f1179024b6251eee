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

#include "selab/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace selab {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty list item in '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

std::pair<double, double> parse_band(const std::string& text) {
  const auto items = split_list(text);
  if (items.size() != 2) throw std::invalid_argument("band needs 'lo,hi', got '" + text + "'");
  return {parse_number<double>(items[0]), parse_number<double>(items[1])};
}

struct Key {
  const char* section;
  const char* name;
  std::function<std::string(const LabConfig&)> get;
  std::function<void(LabConfig&, const std::string&)> set;
};

#define SELAB_INT_KEY(sec, key, field)                                     \
  Key{sec, key, [](const LabConfig& c) { return std::to_string(c.field); }, \
      [](LabConfig& c, const std::string& v) { c.field = parse_number<int>(v); }}
#define SELAB_DOUBLE_KEY(sec, key, field)                         \
  Key{sec, key, [](const LabConfig& c) { return fmt(c.field); }, \
      [](LabConfig& c, const std::string& v) { c.field = parse_number<double>(v); }}
#define SELAB_SNR_KEY(sec, key, field)                                    \
  Key{sec, key, [](const LabConfig& c) { return c.field.describe(); }, \
      [](LabConfig& c, const std::string& v) { c.field = SnrSpec::Parse(v); }}
#define SELAB_LIST_KEY(sec, key, field)                             \
  Key{sec, key, [](const LabConfig& c) { return join(c.field); }, \
      [](LabConfig& c, const std::string& v) { c.field = split_list(v); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      // [corpus]
      Key{"corpus", "manifest", [](const LabConfig& c) { return c.corpus.manifest; },
          [](LabConfig& c, const std::string& v) { c.corpus.manifest = v; }},
      SELAB_INT_KEY("corpus", "sample_rate", corpus.sample_rate),
      SELAB_DOUBLE_KEY("corpus", "duration_s", corpus.duration_s),
      SELAB_INT_KEY("corpus", "train_count", corpus.train_count),
      Key{"corpus", "val_count",
          [](const LabConfig& c) { return std::to_string(c.corpus.val_count); },
          [](LabConfig& c, const std::string& v) {
            c.corpus.val_count = parse_number<int>(v);
            c.train.val_count = c.corpus.val_count;
          }},
      SELAB_INT_KEY("corpus", "test_count", corpus.test_count),
      SELAB_INT_KEY("corpus", "train_count_multiplier", corpus.train_count_multiplier),
      SELAB_INT_KEY("corpus", "noise_pool_size", corpus.noise_pool_size),
      SELAB_SNR_KEY("corpus", "obs_snr", corpus.obs_snr),
      SELAB_SNR_KEY("corpus", "test_snr", corpus.test_snr),
      SELAB_SNR_KEY("corpus", "noise_test_snr", corpus.noise_test_snr),
      Key{"corpus", "disjoint_band",
          [](const LabConfig& c) {
            return fmt(c.corpus.disjoint_lo_hz) + "," + fmt(c.corpus.disjoint_hi_hz);
          },
          [](LabConfig& c, const std::string& v) {
            std::tie(c.corpus.disjoint_lo_hz, c.corpus.disjoint_hi_hz) = parse_band(v);
          }},
      Key{"corpus", "heldout_band",
          [](const LabConfig& c) {
            return fmt(c.corpus.heldout_lo_hz) + "," + fmt(c.corpus.heldout_hi_hz);
          },
          [](LabConfig& c, const std::string& v) {
            std::tie(c.corpus.heldout_lo_hz, c.corpus.heldout_hi_hz) = parse_band(v);
          }},
      // [train]
      Key{"train", "strategy",
          [](const LabConfig& c) { return std::string(to_string(c.train.strategy)); },
          [](LabConfig& c, const std::string& v) { c.train.strategy = strategy_from_string(v); }},
      SELAB_INT_KEY("train", "epochs", train.epochs),
      SELAB_INT_KEY("train", "batch_size", train.batch_size),
      SELAB_DOUBLE_KEY("train", "learning_rate", train.learning_rate),
      Key{"train", "snr",
          [](const LabConfig& c) {
            return c.train.snr_spec ? c.train.snr_spec->describe() : std::string("default");
          },
          [](LabConfig& c, const std::string& v) {
            if (v == "default") {
              c.train.snr_spec.reset();
            } else {
              c.train.snr_spec = SnrSpec::Parse(v);
            }
          }},
      SELAB_INT_KEY("train", "context_frames", train.model.context_frames),
      Key{"train", "hidden_sizes",
          [](const LabConfig& c) {
            std::vector<std::string> items;
            for (int h : c.train.model.hidden_sizes) items.push_back(std::to_string(h));
            return items.empty() ? std::string("none") : join(items);
          },
          [](LabConfig& c, const std::string& v) {
            c.train.model.hidden_sizes.clear();
            if (v == "none") return;
            for (const auto& item : split_list(v)) {
              c.train.model.hidden_sizes.push_back(parse_number<int>(item));
            }
          }},
      SELAB_DOUBLE_KEY("train", "mask_bound", train.model.mask_bound),
      Key{"train", "activation",
          [](const LabConfig& c) { return std::string(to_string(c.train.model.activation)); },
          [](LabConfig& c, const std::string& v) {
            c.train.model.activation = activation_from_string(v);
          }},
      Key{"train", "win_len",
          [](const LabConfig& c) { return std::to_string(c.train.stft.win_len); },
          [](LabConfig& c, const std::string& v) {
            c.train.stft.win_len = parse_number<int>(v);
            c.train.model.input_bins = c.train.stft.win_len / 2 + 1;
          }},
      SELAB_INT_KEY("train", "hop", train.stft.hop),
      Key{"train", "validation",
          [](const LabConfig& c) {
            return std::string(c.train.validation == ValidationMode::kSiSdr ? "si_sdr"
                                                                            : "loss_proxy");
          },
          [](LabConfig& c, const std::string& v) {
            if (v == "si_sdr") {
              c.train.validation = ValidationMode::kSiSdr;
            } else if (v == "loss_proxy") {
              c.train.validation = ValidationMode::kLossProxy;
            } else {
              throw std::invalid_argument("expected si_sdr or loss_proxy, got '" + v + "'");
            }
          }},
      // [experiment]
      Key{"experiment", "name",
          [](const LabConfig& c) { return std::string(to_string(c.experiment.experiment)); },
          [](LabConfig& c, const std::string& v) {
            c.experiment.experiment = experiment_from_string(v);
          }},
      Key{"experiment", "seed",
          [](const LabConfig& c) { return std::to_string(c.experiment.seed); },
          [](LabConfig& c, const std::string& v) {
            c.experiment.seed = parse_number<std::uint64_t>(v);
          }},
      SELAB_LIST_KEY("experiment", "poc_noises", experiment.poc_noises),
      SELAB_LIST_KEY("experiment", "sweep_snrs", experiment.sweep_snrs),
      Key{"experiment", "sweep_noise",
          [](const LabConfig& c) { return c.experiment.sweep_noise; },
          [](LabConfig& c, const std::string& v) { c.experiment.sweep_noise = v; }},
      SELAB_LIST_KEY("experiment", "noise_families", experiment.noise_families),
  };
  return table;
}

#undef SELAB_INT_KEY
#undef SELAB_DOUBLE_KEY
#undef SELAB_SNR_KEY
#undef SELAB_LIST_KEY

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kProofOfConcept:
      return "proof_of_concept";
    case Experiment::kSnrSweep:
      return "snr_sweep";
    case Experiment::kNoiseSweep:
      return "noise_sweep";
  }
  return "?";
}

Experiment experiment_from_string(std::string_view name) {
  if (name == "proof_of_concept") return Experiment::kProofOfConcept;
  if (name == "snr_sweep") return Experiment::kSnrSweep;
  if (name == "noise_sweep") return Experiment::kNoiseSweep;
  throw std::invalid_argument("unknown experiment '" + std::string(name) +
                              "' (expected proof_of_concept, snr_sweep or noise_sweep)");
}

void LabConfig::validate() const {
  train.validate();
  const CorpusConfig& c = corpus;
  if (c.sample_rate <= 0) throw std::invalid_argument("corpus.sample_rate must be > 0");
  if (!(c.duration_s > 0.0)) throw std::invalid_argument("corpus.duration_s must be > 0");
  if (c.train_count < 1 || c.val_count < 1 || c.test_count < 1) {
    throw std::invalid_argument("corpus counts must be >= 1");
  }
  if (c.train_count_multiplier < 1) {
    throw std::invalid_argument("corpus.train_count_multiplier must be >= 1");
  }
  if (c.noise_pool_size < 1) throw std::invalid_argument("corpus.noise_pool_size must be >= 1");
  const double nyquist = c.sample_rate / 2.0;
  for (auto [lo, hi] : {std::pair{c.disjoint_lo_hz, c.disjoint_hi_hz},
                        std::pair{c.heldout_lo_hz, c.heldout_hi_hz}}) {
    if (!(lo >= 0.0 && lo < hi && hi <= nyquist)) {
      throw std::invalid_argument("corpus band " + fmt(lo) + "-" + fmt(hi) +
                                  " Hz must satisfy 0 <= lo < hi <= sample_rate/2");
    }
  }
  const std::size_t min_len = static_cast<std::size_t>(train.stft.win_len / 2 + 1);
  if (static_cast<std::size_t>(c.duration_s * c.sample_rate) < min_len) {
    throw std::invalid_argument("corpus.duration_s is shorter than half an STFT window");
  }
  for (const auto& s : experiment.sweep_snrs) SnrDb::Parse(s);
}

bool operator==(const LabConfig& a, const LabConfig& b) {
  return settings_of(a) == settings_of(b);
}

void apply_setting(LabConfig& config, const std::string& section, const std::string& key,
                   const std::string& value) {
  bool section_known = false;
  for (const Key& k : keys()) {
    if (section != k.section) continue;
    section_known = true;
    if (key != k.name) continue;
    try {
      k.set(config, value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("config [" + section + "] " + key + ": " + e.what());
    }
    return;
  }
  if (!section_known) throw std::invalid_argument("config: unknown section [" + section + "]");
  throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]");
}

SettingMap settings_of(const LabConfig& config) {
  SettingMap out;
  for (const Key& k : keys()) out[k.section][k.name] = k.get(config);
  return out;
}

LabConfig config_from_settings(const SettingMap& settings) {
  LabConfig config;
  // Table order, so win_len lands before anything that reads it.
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [section, entries] : settings) {
    for (const auto& [key, value] : entries) seen.insert({section, key});
  }
  for (const Key& k : keys()) {
    auto sec = settings.find(k.section);
    if (sec == settings.end()) continue;
    auto it = sec->second.find(k.name);
    if (it == sec->second.end()) continue;
    apply_setting(config, k.section, k.name, it->second);
    seen.erase({k.section, k.name});
  }
  if (!seen.empty()) {
    const auto& [section, key] = *seen.begin();
    apply_setting(config, section, key, "");  // throws with the right message
  }
  config.validate();
  return config;
}

LabConfig parse_config(const std::string& ini_text) {
  boost::property_tree::ptree tree;
  std::istringstream is(ini_text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  SettingMap settings;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (section == "corpus" || section == "train" || section == "experiment") continue;
      throw std::invalid_argument("config: key '" + section + "' is outside any section");
    }
    for (const auto& [key, value] : body) {
      settings[section][key] = value.get_value<std::string>();
    }
  }
  return config_from_settings(settings);
}

LabConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path.string());
  std::ostringstream text;
  text << is.rdbuf();
  return parse_config(text.str());
}

std::string to_ini(const LabConfig& config) {
  std::ostringstream os;
  const char* current = nullptr;
  for (const Key& k : keys()) {
    if (current == nullptr || std::string(current) != k.section) {
      if (current != nullptr) os << '\n';
      os << '[' << k.section << "]\n";
      current = k.section;
    }
    os << k.name << " = " << k.get(config) << '\n';
  }
  return os.str();
}

}  // namespace selab
