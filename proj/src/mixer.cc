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

#include "selab/mixer.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace selab {
namespace {

constexpr double kSilentPower = 1e-12;

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "inf" || text == "+inf" || text == "clean") {
    return std::numeric_limits<double>::infinity();
  }
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_double(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_db(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const Waveform& require(const std::optional<Waveform>& w, Strategy s,
                        const char* what) {
  if (!w) {
    throw std::invalid_argument(std::string(to_string(s)) + " pair requires " +
                                what);
  }
  return *w;
}

}  // namespace

SnrDb::SnrDb(double db) : db_(db) {
  if (std::isnan(db) || (std::isinf(db) && db < 0)) {
    throw std::invalid_argument("SnrDb: must be finite or +inf");
  }
}

SnrDb SnrDb::Clean() { return SnrDb(std::numeric_limits<double>::infinity()); }

bool SnrDb::is_clean() const { return std::isinf(db_); }

std::string SnrDb::label() const { return format_db(db_); }

SnrDb SnrDb::Parse(std::string_view text) { return SnrDb(parse_double(text)); }

SnrSpec SnrSpec::Discrete(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("SnrSpec: empty SNR set");
  for (double v : values) SnrDb check(v);
  SnrSpec s;
  s.kind = Kind::kDiscrete;
  s.values = std::move(values);
  return s;
}

SnrSpec SnrSpec::Uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    throw std::invalid_argument("SnrSpec: uniform range needs finite lo <= hi");
  }
  SnrSpec s;
  s.kind = Kind::kUniform;
  s.lo = lo;
  s.hi = hi;
  return s;
}

SnrSpec SnrSpec::Fixed(SnrDb snr) {
  SnrSpec s;
  s.kind = Kind::kFixed;
  s.fixed = snr.db();
  return s;
}

SnrSpec SnrSpec::CleanTargetDefault() { return Discrete({-5.0, 0.0, 5.0, 10.0}); }

SnrSpec SnrSpec::NoisyTargetDefault() { return Uniform(-5.0, 5.0); }

SnrDb SnrSpec::draw(Rng& rng) const {
  switch (kind) {
    case Kind::kDiscrete:
      return SnrDb(values[rng.index(values.size())]);
    case Kind::kUniform:
      return SnrDb(rng.uniform(lo, hi));
    case Kind::kFixed:
      return SnrDb(fixed);
  }
  throw std::logic_error("SnrSpec: bad kind");
}

std::string SnrSpec::describe() const {
  switch (kind) {
    case Kind::kDiscrete: {
      std::string out = "set:";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_db(values[i]);
      }
      return out;
    }
    case Kind::kUniform:
      return "uniform:" + format_db(lo) + "," + format_db(hi);
    case Kind::kFixed:
      return "fixed:" + format_db(fixed);
  }
  return "?";
}

SnrSpec SnrSpec::Parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("SnrSpec: expected 'set:...', 'uniform:lo,hi' or 'fixed:v'");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::vector<double> v = parse_list(text.substr(colon + 1));
  if (kind == "set") return Discrete(v);
  if (kind == "uniform") {
    if (v.size() != 2) throw std::invalid_argument("SnrSpec: uniform needs lo,hi");
    return Uniform(v[0], v[1]);
  }
  if (kind == "fixed") {
    if (v.size() != 1) throw std::invalid_argument("SnrSpec: fixed needs one value");
    return Fixed(SnrDb(v[0]));
  }
  throw std::invalid_argument("SnrSpec: unknown kind '" + std::string(kind) + "'");
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kCtt: return "CTT";
    case Strategy::kNett: return "NeTT";
    case Strategy::kNytt: return "NyTT";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  for (Strategy s : {Strategy::kCtt, Strategy::kNett, Strategy::kNytt}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (expected CTT, NeTT or NyTT)");
}

double gain_for_snr(const Waveform& signal, const Waveform& noise, SnrDb snr) {
  if (snr.is_clean()) throw std::invalid_argument("gain_for_snr: snr must be finite");
  const double ps = mean_power(signal);
  const double pn = mean_power(noise);
  if (ps <= kSilentPower || pn <= kSilentPower) {
    throw std::domain_error("undefined SNR: signal or noise is silent");
  }
  return std::sqrt(ps / (pn * std::pow(10.0, snr.db() / 10.0)));
}

Waveform fit_length(const Waveform& n, std::size_t target_len,
                    std::uint64_t seed) {
  if (target_len == 0) throw std::invalid_argument("fit_length: zero target length");
  if (n.size() == target_len) return n;
  Rng rng(seed);
  std::vector<double> out(target_len);
  if (n.size() > target_len) {
    const std::size_t off = rng.index(n.size() - target_len + 1);
    for (std::size_t i = 0; i < target_len; ++i) out[i] = n[off + i];
  } else {
    const std::size_t off = rng.index(n.size());
    for (std::size_t i = 0; i < target_len; ++i) out[i] = n[(off + i) % n.size()];
  }
  return Waveform(std::move(out), n.sample_rate());
}

Mixture mix_at_snr(const Waveform& x, const Waveform& n, SnrDb snr,
                   std::uint64_t seed) {
  if (x.sample_rate() != n.sample_rate()) {
    throw std::invalid_argument("mix_at_snr: sample rates differ");
  }
  if (snr.is_clean()) {
    return {x, Waveform::Zeros(x.size(), x.sample_rate()), 0.0};
  }
  const Waveform fitted = fit_length(n, x.size(), seed);
  const double g = gain_for_snr(x, fitted, snr);
  Waveform scaled = scale(fitted, g);
  Waveform y = add(x, scaled);
  return {std::move(y), std::move(scaled), g};
}

TrainingPair make_pair(Strategy strategy, const PairSources& sources,
                       const SnrSpec& snr_spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x5A17));
  PairMeta meta;
  meta.seed = seed;
  meta.source_ids = sources.ids;
  switch (strategy) {
    case Strategy::kCtt: {
      const Waveform& s = require(sources.clean, strategy, "a clean signal");
      const Waveform& n = require(sources.noise1, strategy, "a noise signal");
      const SnrDb snr = snr_spec.draw(rng);
      Mixture m = mix_at_snr(s, n, snr, derive_seed(seed, 1));
      meta.snr_db = {snr.db()};
      meta.gains = {m.gain};
      return {std::move(m.mix), s, strategy, std::move(meta)};
    }
    case Strategy::kNett: {
      const Waveform& s = require(sources.clean, strategy, "a clean signal");
      const Waveform& n1 = require(sources.noise1, strategy, "two noise signals");
      const Waveform& n2 = require(sources.noise2, strategy, "two noise signals");
      const SnrDb snr1 = snr_spec.draw(rng);
      const SnrDb snr2 = snr_spec.draw(rng);
      Mixture m1 = mix_at_snr(s, n1, snr1, derive_seed(seed, 1));
      Mixture m2 = mix_at_snr(s, n2, snr2, derive_seed(seed, 2));
      meta.snr_db = {snr1.db(), snr2.db()};
      meta.gains = {m1.gain, m2.gain};
      return {std::move(m1.mix), std::move(m2.mix), strategy, std::move(meta)};
    }
    case Strategy::kNytt: {
      const Waveform& x = require(sources.noisy, strategy, "a noisy signal");
      const Waveform& n = require(sources.noise1, strategy, "a noise signal");
      const SnrDb snr = snr_spec.draw(rng);
      Mixture m = mix_at_snr(x, n, snr, derive_seed(seed, 1));
      meta.snr_db = {snr.db()};
      meta.gains = {m.gain};
      return {std::move(m.mix), x, strategy, std::move(meta)};
    }
  }
  throw std::logic_error("make_pair: bad strategy");
}

std::vector<NoiseAssignment> swap_noise_augment(std::size_t clean_count,
                                                std::size_t noise_pool_size,
                                                std::uint64_t seed) {
  if (noise_pool_size == 0) throw std::invalid_argument("swap_noise_augment: empty noise pool");
  Rng rng(seed);
  std::vector<NoiseAssignment> out;
  out.reserve(clean_count);
  for (std::size_t i = 0; i < clean_count; ++i) {
    out.push_back({i, rng.index(noise_pool_size), derive_seed(seed, 0xA55, i)});
  }
  return out;
}

}  // namespace selab
