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

#include "selab/corpus.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "selab/wav_io.h"

namespace selab {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSpeechStream = 0x5BEEC4;
constexpr std::uint64_t kNoiseStream = 0x7015E;
constexpr std::uint64_t kNoisyStream = 0x7015F;

std::uint64_t name_code(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string indexed(const std::string& prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%04zu", i);
  return prefix + buf;
}

std::uint64_t split_code(const std::string& split) { return name_code("split:" + split); }

void add_speech(LabCorpus& lab, std::vector<Utterance>& out, const std::string& split,
                int count, double duration_s, std::uint64_t seed) {
  for (int i = 0; i < count; ++i) {
    SynthSpec spec{SynthKind::kSpeechLike, duration_s,
                   derive_seed(seed, kSpeechStream, split_code(split), i)};
    Utterance u{indexed(split, i), synth(spec, lab.sample_rate)};
    ManifestEntry e;
    e.id = u.id;
    e.role = Role::kClean;
    e.path = "clean/" + split + "/" + u.id + ".wav";
    e.synth = spec;
    e.duration_s = duration_s;
    e.seed = spec.seed;
    e.split = split;
    lab.manifest.entries.push_back(e);
    out.push_back(std::move(u));
  }
}

void add_pool(LabCorpus& lab, const CorpusConfig& c, const std::string& pool,
              const std::string& family, const std::string& split, int count,
              std::uint64_t seed) {
  auto& clips = lab.noise[pool];
  for (int i = 0; i < count; ++i) {
    const SynthSpec spec =
        family_spec(family, c, derive_seed(seed, kNoiseStream, name_code(pool), i));
    Utterance u{indexed("noise-" + pool, i), synth(spec, lab.sample_rate)};
    ManifestEntry e;
    e.id = u.id;
    e.role = Role::kNoise;
    e.path = "noise/" + pool + "/" + u.id + ".wav";
    e.synth = spec;
    e.duration_s = c.duration_s;
    e.seed = spec.seed;
    e.split = split;
    e.pool = pool;
    lab.manifest.entries.push_back(e);
    clips.push_back(std::move(u));
  }
}

json synth_to_json(const SynthSpec& s) {
  return json{{"kind", std::string(to_string(s.kind))},
              {"duration_s", s.duration_s},
              {"seed", s.seed},
              {"lo_hz", s.lo_hz},
              {"hi_hz", s.hi_hz}};
}

SynthSpec synth_from_json(const json& j) {
  SynthSpec s;
  s.kind = synth_kind_from_string(j.at("kind").get<std::string>());
  s.duration_s = j.at("duration_s").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.lo_hz = j.at("lo_hz").get<double>();
  s.hi_hz = j.at("hi_hz").get<double>();
  return s;
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::kClean:
      return "clean";
    case Role::kNoise:
      return "noise";
    case Role::kNoisy:
      return "noisy";
  }
  return "?";
}

Role role_from_string(std::string_view name) {
  if (name == "clean") return Role::kClean;
  if (name == "noise") return Role::kNoise;
  if (name == "noisy") return Role::kNoisy;
  throw std::invalid_argument("unknown role '" + std::string(name) + "'");
}

void CorpusManifest::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("manifest: sample_rate must be > 0");
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (e.id.empty()) throw std::invalid_argument("manifest: entry with empty id");
    if (!ids.insert(e.id).second) throw std::invalid_argument("manifest: duplicate id " + e.id);
    if (e.path.empty()) throw std::invalid_argument("manifest: entry " + e.id + " has no path");
    if (e.role == Role::kNoisy && !e.obs_snr_db) {
      throw std::invalid_argument("manifest: noisy entry " + e.id + " has no obs_snr_db");
    }
    if (e.role == Role::kNoise && e.pool.empty()) {
      throw std::invalid_argument("manifest: noise entry " + e.id + " has no pool");
    }
  }
}

std::string CorpusManifest::to_json() const {
  json j;
  j["sample_rate"] = sample_rate;
  j["seed"] = seed;
  json arr = json::array();
  for (const auto& e : entries) {
    json je{{"id", e.id},
            {"role", std::string(selab::to_string(e.role))},
            {"path", e.path},
            {"synth", e.synth ? synth_to_json(*e.synth) : json(nullptr)},
            {"duration_s", e.duration_s},
            {"seed", e.seed},
            {"split", e.split},
            {"pool", e.pool}};
    if (e.obs_snr_db) je["obs_snr_db"] = *e.obs_snr_db;
    if (!e.eval_only_reference.empty()) je["eval_only_reference"] = e.eval_only_reference;
    arr.push_back(std::move(je));
  }
  j["entries"] = std::move(arr);
  return j.dump(2) + "\n";
}

CorpusManifest CorpusManifest::FromJson(const std::string& text) {
  CorpusManifest m;
  try {
    const json j = json::parse(text);
    m.sample_rate = j.at("sample_rate").get<int>();
    m.seed = j.value("seed", std::uint64_t{0});
    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.id = je.at("id").get<std::string>();
      e.role = role_from_string(je.at("role").get<std::string>());
      e.path = je.at("path").get<std::string>();
      if (je.contains("synth") && !je.at("synth").is_null()) e.synth = synth_from_json(je.at("synth"));
      e.duration_s = je.value("duration_s", 0.0);
      e.seed = je.value("seed", std::uint64_t{0});
      e.split = je.value("split", std::string());
      e.pool = je.value("pool", std::string());
      if (je.contains("obs_snr_db")) e.obs_snr_db = je.at("obs_snr_db").get<double>();
      e.eval_only_reference = je.value("eval_only_reference", std::string());
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("manifest: ") + e.what());
  }
  m.validate();
  return m;
}

const std::vector<Utterance>& LabCorpus::pool(const std::string& name) const {
  auto it = noise.find(name);
  if (it == noise.end() || it->second.empty()) {
    throw std::invalid_argument("corpus has no noise pool '" + name + "'");
  }
  return it->second;
}

SynthSpec family_spec(const std::string& family, const CorpusConfig& c, std::uint64_t seed) {
  SynthSpec s;
  s.duration_s = c.duration_s;
  s.seed = seed;
  if (family == "pink") {
    s.kind = SynthKind::kPinkNoise;
  } else if (family == "white") {
    s.kind = SynthKind::kWhiteNoise;
  } else if (family == "babble") {
    s.kind = SynthKind::kBabbleLike;
  } else if (family == "band") {
    s.kind = SynthKind::kBandNoise;
    s.lo_hz = c.disjoint_lo_hz;
    s.hi_hz = c.disjoint_hi_hz;
  } else if (family == "heldout") {
    s.kind = SynthKind::kBandNoise;
    s.lo_hz = c.heldout_lo_hz;
    s.hi_hz = c.heldout_hi_hz;
  } else {
    throw std::invalid_argument("unknown noise family '" + family +
                                "' (expected pink, babble, white, band or heldout)");
  }
  return s;
}

LabCorpus build_corpus(const CorpusConfig& c, std::uint64_t seed) {
  LabCorpus lab;
  lab.sample_rate = c.sample_rate;
  lab.manifest.sample_rate = c.sample_rate;
  lab.manifest.seed = seed;

  add_speech(lab, lab.train_clean, "train", c.train_count, c.duration_s, seed);
  add_speech(lab, lab.val_clean, "val", c.val_count, c.duration_s, seed);
  add_speech(lab, lab.test_clean, "test", c.test_count, c.duration_s, seed);

  for (const char* family : {"pink", "babble", "white", "band"}) {
    add_pool(lab, c, family, family, "train", c.noise_pool_size, seed);
  }
  add_pool(lab, c, "obs", "pink", "train", c.noise_pool_size, seed);
  add_pool(lab, c, "val", "pink", "val", c.val_count, seed);
  add_pool(lab, c, "test", "pink", "test", c.test_count, seed);
  add_pool(lab, c, "heldout", "heldout", "test", c.test_count, seed);

  // Noisy corpus: the training speech plus, for a multiplier above one,
  // extra speech that exists only in noisy form.
  std::vector<Utterance> sources = lab.train_clean;
  const int total = c.train_count * c.train_count_multiplier;
  for (int i = c.train_count; i < total; ++i) {
    SynthSpec spec{SynthKind::kSpeechLike, c.duration_s,
                   derive_seed(seed, kSpeechStream, split_code("extra"), i)};
    sources.push_back({"", synth(spec, c.sample_rate)});
  }
  const std::uint64_t noisy_seed = derive_seed(seed, kNoisyStream);
  const std::vector<Utterance>& obs = lab.noise.at("obs");
  NoisySpeechCorpus noisy = make_noisy_corpus(sources, obs, c.obs_snr, noisy_seed);
  for (std::size_t i = 0; i < noisy.noisy.size(); ++i) {
    Utterance& u = noisy.noisy[i];
    u.id = indexed("noisy", i);
    ManifestEntry e;
    e.id = u.id;
    e.role = Role::kNoisy;
    e.path = "noisy/train/" + u.id + ".wav";
    e.duration_s = c.duration_s;
    e.seed = derive_seed(noisy_seed, i);
    e.split = "train";
    Rng rng(derive_seed(noisy_seed, i));  // replays the draw in make_noisy_corpus
    e.obs_snr_db = c.obs_snr.draw(rng).db();
    e.eval_only_reference = sources[i].id;
    lab.manifest.entries.push_back(e);
  }
  lab.train_noisy = std::move(noisy.noisy);
  lab.manifest.validate();
  return lab;
}

void write_corpus(const LabCorpus& lab, const std::filesystem::path& dir) {
  std::map<std::string, const Waveform*> by_id;
  auto index = [&](const std::vector<Utterance>& us) {
    for (const auto& u : us) by_id[u.id] = &u.wave;
  };
  index(lab.train_clean);
  index(lab.train_noisy);
  index(lab.val_clean);
  index(lab.test_clean);
  for (const auto& [name, clips] : lab.noise) index(clips);

  for (const auto& e : lab.manifest.entries) {
    auto it = by_id.find(e.id);
    if (it == by_id.end()) throw std::runtime_error("corpus has no audio for manifest id " + e.id);
    const std::filesystem::path path = dir / e.path;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create " + path.parent_path().string() + ": " + ec.message());
    write_wav(path, *it->second, WavEncoding::kFloat32);
  }
  const std::filesystem::path manifest = dir / "manifest.json";
  std::ofstream os(manifest, std::ios::binary | std::ios::trunc);
  os << lab.manifest.to_json();
  if (!os) throw std::runtime_error("cannot write " + manifest.string());
}

LabCorpus load_corpus(const std::filesystem::path& manifest_path) {
  std::ifstream is(manifest_path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read manifest " + manifest_path.string());
  std::ostringstream text;
  text << is.rdbuf();
  LabCorpus lab;
  lab.manifest = CorpusManifest::FromJson(text.str());
  lab.sample_rate = lab.manifest.sample_rate;
  const std::filesystem::path dir = manifest_path.parent_path();
  for (const auto& e : lab.manifest.entries) {
    Waveform w = read_wav(dir / e.path);
    if (w.sample_rate() != lab.sample_rate) {
      throw std::runtime_error((dir / e.path).string() + ": sample rate " +
                               std::to_string(w.sample_rate()) + " differs from manifest " +
                               std::to_string(lab.sample_rate));
    }
    Utterance u{e.id, std::move(w)};
    switch (e.role) {
      case Role::kNoise:
        lab.noise[e.pool].push_back(std::move(u));
        break;
      case Role::kNoisy:
        lab.train_noisy.push_back(std::move(u));
        break;
      case Role::kClean:
        if (e.split == "train") {
          lab.train_clean.push_back(std::move(u));
        } else if (e.split == "val") {
          lab.val_clean.push_back(std::move(u));
        } else if (e.split == "test") {
          lab.test_clean.push_back(std::move(u));
        } else {
          throw std::runtime_error("manifest: clean entry " + e.id + " has unknown split '" +
                                   e.split + "'");
        }
        break;
    }
  }
  return lab;
}

LabCorpus obtain_corpus(const CorpusConfig& config, std::uint64_t seed) {
  if (!config.manifest.empty()) return load_corpus(config.manifest);
  return build_corpus(config, seed);
}

NoisySpeechCorpus make_noisy_corpus(const std::vector<Utterance>& clean,
                                    const std::vector<Utterance>& pool, const SnrSpec& snr,
                                    std::uint64_t seed) {
  if (pool.empty()) throw std::invalid_argument("make_noisy_corpus: empty noise pool");
  NoisySpeechCorpus out;
  out.noisy.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    const SnrDb db = snr.draw(rng);
    const Utterance& n = pool[rng.index(pool.size())];
    Mixture m = mix_at_snr(clean[i].wave, n.wave, db, derive_seed(seed, i, 1));
    out.noisy.push_back({indexed("noisy", i), std::move(m.mix)});
  }
  return out;
}

ValidationSet make_eval_set(const std::vector<Utterance>& clean,
                            const std::vector<Utterance>& pool, const SnrSpec& snr,
                            std::uint64_t seed) {
  if (pool.empty()) throw std::invalid_argument("make_eval_set: empty noise pool");
  ValidationSet out;
  out.items.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    const SnrDb db = snr.draw(rng);
    const Utterance& n = pool[i % pool.size()];
    Mixture m = mix_at_snr(clean[i].wave, n.wave, db, derive_seed(seed, i, 1));
    out.items.push_back({clean[i].id, std::move(m.mix), clean[i].wave});
  }
  return out;
}

}  // namespace selab
