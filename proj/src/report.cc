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

#include "selab/report.h"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "selab/overlap.h"

namespace selab {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string file_label(const std::string& label) {
  std::string out;
  for (char c : label) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << content;
  os.close();
  if (!os) throw std::runtime_error("cannot write " + path.string());
  written.push_back(path);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

json stats_json(const ColumnStats& s) {
  return json{{"mean", s.mean}, {"median", s.median}, {"variance", s.variance}};
}

json report_json(const MetricsReport& r) {
  json records = json::array();
  for (const auto& u : r.records) {
    records.push_back(json{{"utt_id", u.utt_id},
                           {"si_sdr_in", u.si_sdr_in},
                           {"si_sdr_out", u.si_sdr_out},
                           {"si_sdri", u.si_sdri},
                           {"lsd", u.lsd}});
  }
  return json{{"method", r.method},
              {"records", std::move(records)},
              {"aggregates",
               {{"si_sdr_in", stats_json(r.si_sdr_in)},
                {"si_sdr_out", stats_json(r.si_sdr_out)},
                {"si_sdri", stats_json(r.si_sdri)},
                {"lsd", stats_json(r.lsd)}}}};
}

json reports_json(std::span<const MetricsReport> reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr;
}

json history_json(const TrainHistory& h) {
  json epochs = json::array();
  for (std::size_t i = 0; i < h.epochs.size(); ++i) {
    epochs.push_back(json{{"epoch", h.epochs[i].epoch},
                          {"mean_loss", h.epochs[i].mean_loss},
                          {"val_si_sdr", h.epochs[i].val_score},
                          {"is_best", static_cast<int>(i) == h.best_index}});
  }
  return json{{"initial_val_si_sdr", h.initial_val_score}, {"epochs", std::move(epochs)}};
}

json sweep_json(std::span<const SweepPoint> points) {
  json arr = json::array();
  for (const auto& p : points) {
    arr.push_back(json{{"point_label", p.label},
                       {"si_sdri_mean", p.report.si_sdri.mean},
                       {"si_sdri_median", p.report.si_sdri.median},
                       {"si_sdri_var", p.report.si_sdri.variance}});
  }
  return arr;
}

json envelope(const LabConfig& config, json tables) {
  json settings = json::object();
  for (const auto& [section, entries] : settings_of(config)) {
    for (const auto& [key, value] : entries) settings[section][key] = value;
  }
  return json{{"experiment", std::string(to_string(config.experiment.experiment))},
              {"seed", config.experiment.seed},
              {"si_sdr_cap_db", kSiSdrCap},
              {"lsd_note", "log-spectral distance in dB; proxy quality score"},
              {"config", std::move(settings)},
              {"tables", std::move(tables)}};
}

std::string csv_of(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

std::vector<MetricsReport> point_reports(std::span<const SweepPoint> points) {
  std::vector<MetricsReport> out;
  for (const auto& p : points) out.push_back(p.report);
  return out;
}

void emit_histories(const std::string& prefix, const std::vector<MethodRun>& runs,
                    const std::filesystem::path& dir, std::vector<std::filesystem::path>& written) {
  for (const auto& run : runs) {
    write_file(dir / (prefix + "_history_" + file_label(run.label) + ".csv"),
               csv_of([&](std::ostream& os) { run.history.write_csv(os); }), written);
  }
}

std::vector<MethodRun> point_runs(std::span<const SweepPoint> points) {
  std::vector<MethodRun> out;
  for (const auto& p : points) out.push_back({p.label, p.history});
  return out;
}

json histories_json(const std::vector<MethodRun>& runs) {
  json out = json::object();
  for (const auto& run : runs) out[run.label] = history_json(run.history);
  return out;
}

}  // namespace

void write_metrics_csv(std::ostream& os, std::span<const MetricsReport> reports) {
  os << "utt_id,method,si_sdr_in,si_sdr_out,si_sdri,lsd\n";
  for (const auto& r : reports) {
    for (const auto& u : r.records) {
      os << u.utt_id << ',' << r.method << ',' << num(u.si_sdr_in) << ',' << num(u.si_sdr_out)
         << ',' << num(u.si_sdri) << ',' << num(u.lsd) << '\n';
    }
    auto footer = [&](const char* name, double ColumnStats::*field) {
      os << name << ',' << r.method << ',' << num(r.si_sdr_in.*field) << ','
         << num(r.si_sdr_out.*field) << ',' << num(r.si_sdri.*field) << ','
         << num(r.lsd.*field) << '\n';
    };
    footer("__mean__", &ColumnStats::mean);
    footer("__median__", &ColumnStats::median);
    footer("__variance__", &ColumnStats::variance);
  }
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
  os << "point_label,si_sdri_mean,si_sdri_median,si_sdri_var\n";
  for (const auto& p : points) {
    os << p.label << ',' << num(p.report.si_sdri.mean) << ',' << num(p.report.si_sdri.median)
       << ',' << num(p.report.si_sdri.variance) << '\n';
  }
}

void write_overlap_csv(std::ostream& os, std::span<const OverlapRow> rows) {
  os << "family,overlap_score,nn_distance,scale\n";
  for (const auto& r : rows) {
    char score[32];
    std::snprintf(score, sizeof(score), "%.6e", r.stats.score);
    os << r.family << ',' << score << ',' << num(r.stats.distance) << ',' << num(r.stats.scale)
       << '\n';
  }
}

void write_embeddings_csv(std::ostream& os, std::span<const EmbeddingRow> rows) {
  os << "pool,clip_id";
  const Eigen::Index dims = rows.empty() ? kOverlapBands : rows.front().embedding.size();
  for (Eigen::Index b = 0; b < dims; ++b) {
    char name[16];
    std::snprintf(name, sizeof(name), ",band_%02d", static_cast<int>(b));
    os << name;
  }
  os << '\n';
  for (const auto& r : rows) {
    os << r.pool << ',' << r.clip_id;
    for (Eigen::Index b = 0; b < r.embedding.size(); ++b) os << ',' << num(r.embedding[b]);
    os << '\n';
  }
}

std::string metrics_json(const LabConfig& config, std::span<const MetricsReport> reports) {
  return envelope(config, json{{"metrics", reports_json(reports)}}).dump(2) + "\n";
}

LabConfig config_from_report_json(const std::string& json_text) {
  SettingMap settings;
  try {
    const json j = json::parse(json_text);
    for (const auto& [section, entries] : j.at("config").items()) {
      for (const auto& [key, value] : entries.items()) {
        settings[section][key] = value.get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("report config: ") + e.what());
  }
  return config_from_settings(settings);
}

std::vector<std::filesystem::path> emit_metrics_report(const LabConfig& config,
                                                       std::span<const MetricsReport> reports,
                                                       const std::filesystem::path& dir,
                                                       const std::string& stem) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  write_file(dir / (stem + "_metrics.csv"),
             csv_of([&](std::ostream& os) { write_metrics_csv(os, reports); }), written);
  write_file(dir / (stem + ".json"), metrics_json(config, reports), written);
  return written;
}

std::vector<std::filesystem::path> emit_poc_report(const LabConfig& config,
                                                   const PocResult& result,
                                                   const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  write_file(dir / "poc_matched_metrics.csv",
             csv_of([&](std::ostream& os) { write_metrics_csv(os, result.matched); }), written);
  write_file(dir / "poc_mismatched_metrics.csv",
             csv_of([&](std::ostream& os) { write_metrics_csv(os, result.mismatched); }),
             written);
  emit_histories("poc", result.runs, dir, written);
  const json tables{{"matched", reports_json(result.matched)},
                    {"mismatched", reports_json(result.mismatched)},
                    {"histories", histories_json(result.runs)}};
  write_file(dir / "poc.json", envelope(config, tables).dump(2) + "\n", written);
  return written;
}

std::vector<std::filesystem::path> emit_snr_sweep_report(const LabConfig& config,
                                                         const SweepResult& result,
                                                         const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  const auto reports = point_reports(result.points);
  const auto runs = point_runs(result.points);
  write_file(dir / "snr_sweep.csv",
             csv_of([&](std::ostream& os) { write_sweep_csv(os, result.points); }), written);
  write_file(dir / "snr_sweep_metrics.csv",
             csv_of([&](std::ostream& os) { write_metrics_csv(os, reports); }), written);
  emit_histories("snr_sweep", runs, dir, written);
  const json tables{{"sweep", sweep_json(result.points)},
                    {"metrics", reports_json(reports)},
                    {"histories", histories_json(runs)}};
  write_file(dir / "snr_sweep.json", envelope(config, tables).dump(2) + "\n", written);
  return written;
}

std::vector<std::filesystem::path> emit_noise_sweep_report(const LabConfig& config,
                                                           const NoiseSweepResult& result,
                                                           const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  const auto reports = point_reports(result.points);
  const auto runs = point_runs(result.points);
  write_file(dir / "noise_sweep.csv",
             csv_of([&](std::ostream& os) { write_sweep_csv(os, result.points); }), written);
  write_file(dir / "noise_sweep_metrics.csv",
             csv_of([&](std::ostream& os) { write_metrics_csv(os, reports); }), written);
  write_file(dir / "noise_overlap.csv",
             csv_of([&](std::ostream& os) { write_overlap_csv(os, result.overlap); }), written);
  write_file(dir / "noise_embeddings.csv",
             csv_of([&](std::ostream& os) { write_embeddings_csv(os, result.embeddings); }),
             written);
  emit_histories("noise_sweep", runs, dir, written);
  json overlap = json::array();
  for (const auto& r : result.overlap) {
    overlap.push_back(json{{"family", r.family},
                           {"overlap_score", r.stats.score},
                           {"nn_distance", r.stats.distance},
                           {"scale", r.stats.scale}});
  }
  const json tables{{"sweep", sweep_json(result.points)},
                    {"metrics", reports_json(reports)},
                    {"overlap", std::move(overlap)},
                    {"histories", histories_json(runs)}};
  write_file(dir / "noise_sweep.json", envelope(config, tables).dump(2) + "\n", written);
  return written;
}

}  // namespace selab
