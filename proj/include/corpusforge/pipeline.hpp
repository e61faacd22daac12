// Copyright (c) 2026 The corpusforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "corpusforge/asr_client.hpp"
#include "corpusforge/audio.hpp"
#include "corpusforge/cer.hpp"
#include "corpusforge/clean.hpp"
#include "corpusforge/config.hpp"
#include "corpusforge/corpus.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/prompt.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

using LogSink = std::function<void(LogLevel, const std::string&)>;

// ---------------------------------------------------------------------------
// Stage: scan

struct ScanReport {
  size_t files = 0;
  size_t empty_files = 0;
  size_t silent_files = 0;
  double total_seconds = 0.0;
};

struct AudioProbe {
  int sample_rate = 0;
  size_t num_samples = 0;
  bool all_zero = true;
};

inline AudioProbe probe_audio(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const WavInfo info = probe_wav_bytes(bytes, path.string());
  AudioProbe p{info.sample_rate, info.num_samples, true};
  const char* data = bytes.data() + info.data_offset;
  for (size_t i = 0; i < info.num_samples && p.all_zero; ++i) {
    p.all_zero = data[2 * i] == 0 && data[2 * i + 1] == 0;
  }
  return p;
}

/// Fills duration_s and sample_rate from the audio headers. Returns the
/// probes in manifest order alongside the updated manifest.
inline std::pair<Manifest, std::vector<AudioProbe>> scan_manifest(
    const Manifest& raw, const std::filesystem::path& audio_root, unsigned workers,
    ScanReport* report = nullptr) {
  std::vector<AudioProbe> probes(raw.size());
  parallel_for(raw.size(), workers, [&](size_t i) {
    probes[i] = probe_audio(audio_root / raw.utterances[i].audio_path);
  });
  Manifest out = raw;
  ScanReport rep;
  for (size_t i = 0; i < out.size(); ++i) {
    auto& u = out.utterances[i];
    u.sample_rate = probes[i].sample_rate;
    u.duration_s = static_cast<double>(probes[i].num_samples) / probes[i].sample_rate;
    ++rep.files;
    if (probes[i].num_samples == 0) {
      ++rep.empty_files;
    } else if (probes[i].all_zero) {
      ++rep.silent_files;
    }
    rep.total_seconds += u.duration_s;
  }
  if (report) *report = rep;
  return {std::move(out), std::move(probes)};
}

// ---------------------------------------------------------------------------
// Stage: trim + normalize

struct AudioStageReport {
  size_t processed = 0;
  size_t dropped_silent = 0;
  double seconds_before = 0.0;
  double seconds_after = 0.0;
};

struct AudioStageResult {
  Manifest trimmed;     // post-trim durations, original audio paths
  Manifest normalized;  // audio paths under "audio/" in the output directory
  AudioStageReport trim_report;
  AudioStageReport normalize_report;
};

/// Trims and peak-normalizes every clip. Normalized audio goes to
/// out_dir/audio/<audio_path> unless out_dir is empty (dry run).
inline AudioStageResult trim_and_normalize(const Manifest& m,
                                           const std::filesystem::path& audio_root,
                                           const std::optional<std::filesystem::path>& out_dir,
                                           const TrimSpec& trim, double target_peak,
                                           unsigned workers) {
  struct Outcome {
    bool dropped = false;
    size_t trimmed_samples = 0;
  };
  std::vector<Outcome> outcomes(m.size());
  parallel_for(m.size(), workers, [&](size_t i) {
    const auto& u = m.utterances[i];
    AudioBuffer audio;
    try {
      audio = decode_wav(audio_root / u.audio_path);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyAudio) throw;
      outcomes[i].dropped = true;
      return;
    }
    TrimResult t;
    try {
      t = trim_silence(audio, trim);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FullySilent) throw;
      outcomes[i].dropped = true;
      return;
    }
    outcomes[i].trimmed_samples = t.audio.size();
    const AudioBuffer normalized = normalize_volume(t.audio, target_peak);
    if (out_dir) encode_wav(normalized, *out_dir / "audio" / u.audio_path);
  });

  AudioStageResult r;
  r.trimmed = Manifest{{}, m.split, m.created_from};
  r.normalized = Manifest{{}, m.split, m.created_from};
  for (size_t i = 0; i < m.size(); ++i) {
    const auto& u = m.utterances[i];
    r.trim_report.seconds_before += u.duration_s;
    if (outcomes[i].dropped) {
      ++r.trim_report.dropped_silent;
      continue;
    }
    Utterance t = u;
    t.duration_s = static_cast<double>(outcomes[i].trimmed_samples) / u.sample_rate;
    ++r.trim_report.processed;
    r.trim_report.seconds_after += t.duration_s;
    r.trimmed.utterances.push_back(t);
    t.audio_path = (std::filesystem::path("audio") / u.audio_path).generic_string();
    ++r.normalize_report.processed;
    r.normalize_report.seconds_before += t.duration_s;
    r.normalize_report.seconds_after += t.duration_s;
    r.normalized.utterances.push_back(std::move(t));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Whole pipeline

struct PipelineOptions {
  bool dry_run = false;
  LogSink log;
};

struct PipelineResult {
  Manifest train;
  Manifest val;
  /// Every stage's report, keyed by stage name.
  nlohmann::ordered_json report;
};

namespace detail {

inline nlohmann::ordered_json to_json(const ScanReport& r) {
  nlohmann::ordered_json j;
  j["files"] = r.files;
  j["empty_files"] = r.empty_files;
  j["silent_files"] = r.silent_files;
  j["hours"] = r.total_seconds / 3600.0;
  return j;
}

inline nlohmann::ordered_json to_json(const AudioStageReport& r) {
  nlohmann::ordered_json j;
  j["processed"] = r.processed;
  j["dropped_silent"] = r.dropped_silent;
  j["hours_before"] = r.seconds_before / 3600.0;
  j["hours_after"] = r.seconds_after / 3600.0;
  return j;
}

inline nlohmann::ordered_json stats_json(const DatasetStats& s) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  const std::string rendered = render_stats_jsonl(s);
  for (const auto& line : split_lines(rendered)) {
    if (!line.empty()) j.push_back(nlohmann::ordered_json::parse(line));
  }
  return j;
}

}  // namespace detail

/// Runs scan, clean, trim, normalize, cer/select (when hypotheses are
/// configured), filter, split and stats, in that order. Each stage's
/// manifest snapshot and report land in cfg.out_dir unless dry_run is set.
/// Output bytes do not depend on cfg.workers.
inline PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineOptions& opts = {}) {
  validate(cfg);
  auto log = [&](LogLevel level, const std::string& msg) {
    if (opts.log) opts.log(level, msg);
  };
  const std::filesystem::path out_dir = cfg.resolve(cfg.out_dir);
  const std::filesystem::path manifest_path = cfg.resolve(cfg.manifest);
  const std::string provenance = cfg.manifest.generic_string();
  const bool write = !opts.dry_run;
  nlohmann::ordered_json report;

  auto snapshot = [&](Manifest m, const std::string& name, const std::string& stage) {
    m.created_from = stage + " <- " + provenance;
    if (write) save_manifest(m, out_dir / name);
    return m;
  };
  auto write_text = [&](const std::string& name, const std::string& data) {
    if (write) write_file(out_dir / name, data);
  };

  // scan
  log(LogLevel::info, "scan: " + manifest_path.string());
  Manifest raw = load_manifest(manifest_path, LoadOptions{.require_audio_fields = false});
  ScanReport scan_rep;
  auto [scanned, probes] = scan_manifest(raw, cfg.corpus_root, cfg.workers, &scan_rep);
  scanned = snapshot(std::move(scanned), "00_scan.jsonl", "scan");
  report["scan"] = detail::to_json(scan_rep);
  log(LogLevel::info, "scan: " + std::to_string(scan_rep.files) + " files");

  // clean
  std::map<std::string, bool> empty_by_id;
  for (size_t i = 0; i < scanned.size(); ++i) {
    empty_by_id[scanned.utterances[i].id] = probes[i].num_samples == 0 || probes[i].all_zero;
  }
  auto cleaned = clean_all(scanned, cfg.separator,
                           [&](const Utterance& u) { return empty_by_id.at(u.id); });
  Manifest clean_m = snapshot(std::move(cleaned.manifest), "01_clean.jsonl", "clean");
  report["clean"] = to_json(cleaned.report);
  write_text("clean_report.json", dump_line(to_json(cleaned.report)) + "\n");
  write_text("clean_report.txt", render_cleaning_table(cleaned.report));
  log(LogLevel::info, "clean: " + std::to_string(clean_m.size()) + " utterances remain");

  // trim + normalize
  auto audio = trim_and_normalize(clean_m, cfg.corpus_root,
                                  write ? std::optional(out_dir) : std::nullopt, cfg.trim,
                                  cfg.target_peak, cfg.workers);
  snapshot(audio.trimmed, "02_trim.jsonl", "trim");
  Manifest current = snapshot(std::move(audio.normalized), "03_normalize.jsonl", "normalize");
  report["trim"] = detail::to_json(audio.trim_report);
  report["normalize"] = detail::to_json(audio.normalize_report);
  log(LogLevel::info, "trim/normalize: " + std::to_string(current.size()) + " clips");

  // cer + select
  if (cfg.hypotheses || cfg.asr_endpoint) {
    std::vector<HypothesisRecord> hyps;
    nlohmann::ordered_json cer_rep;
    if (cfg.hypotheses) {
      hyps = ingest_hypotheses(cfg.resolve(*cfg.hypotheses));
    } else {
      // ASR runs on the source recordings, as listed in the clean snapshot.
      std::set<std::string> alive;
      for (const auto& u : current.utterances) alive.insert(u.id);
      const Manifest source =
          filter_manifest(clean_m, [&](const Utterance& u) { return alive.contains(u.id); });
      AsrClientOptions asr;
      asr.max_in_flight = cfg.workers;
      auto fetched = fetch_hypotheses(*cfg.asr_endpoint, source, cfg.corpus_root, asr);
      nlohmann::ordered_json failures = nlohmann::ordered_json::array();
      for (const auto& f : fetched.failures) {
        failures.push_back({{"id", f.id}, {"reason", f.reason}});
        log(LogLevel::warn, "asr: " + f.id + ": " + f.reason);
      }
      cer_rep["asr_failures"] = std::move(failures);
      hyps = std::move(fetched.records);
    }
    CerScoringReport scoring;
    const auto records = score_manifest(current, hyps,
                                        CerOptions{cfg.cer_normalize, cfg.cer_casefold},
                                        &scoring);
    write_text("04_cer.jsonl", serialize_cer_records(records));
    cer_rep["scored"] = scoring.scored;
    cer_rep["missing_hypothesis"] = scoring.missing_hypothesis;
    cer_rep["empty_reference"] = scoring.empty_reference;
    cer_rep["unmatched_hypotheses"] = scoring.unmatched_hypotheses;
    report["cer"] = std::move(cer_rep);

    SelectionReport sel;
    current = snapshot(select_top_n(current, records, cfg.cer_top_n, &sel), "05_select.jsonl",
                       "select");
    report["select"] = {{"top_n", cfg.cer_top_n},
                        {"selected", sel.selected},
                        {"dropped_by_rank", sel.dropped_by_rank},
                        {"unscored", sel.unscored}};
    log(LogLevel::info, "select: kept " + std::to_string(sel.selected));
  } else {
    log(LogLevel::info, "cer/select: skipped (no hypotheses configured)");
  }

  // filter
  const size_t before_filter = current.size();
  current = snapshot(filter_min_duration(current, cfg.min_duration_s), "06_filter.jsonl",
                     "filter");
  report["filter"] = {{"min_duration_s", cfg.min_duration_s},
                      {"kept", current.size()},
                      {"removed", before_filter - current.size()}};
  if (current.empty()) log(LogLevel::warn, "filter: no utterances left");

  // split
  auto [train, val] = split_train_val(current, cfg.split);
  train = snapshot(std::move(train), "07_train.jsonl", "split");
  val = snapshot(std::move(val), "07_val.jsonl", "split");
  report["split"] = {{"train", train.size()}, {"val", val.size()}};

  // stats
  const auto all_stats = compute_stats(current);
  const auto train_stats = compute_stats(train);
  const auto val_stats = compute_stats(val);
  write_text("stats.txt", "all\n" + render_stats_table(all_stats) + "\ntrain\n" +
                              render_stats_table(train_stats) + "\nval\n" +
                              render_stats_table(val_stats));
  write_text("stats.jsonl", render_stats_jsonl(all_stats));
  report["stats"] = {{"all", detail::stats_json(all_stats)},
                     {"train", detail::stats_json(train_stats)},
                     {"val", detail::stats_json(val_stats)}};

  write_text("pipeline_report.json", report.dump(2) + "\n");
  return {std::move(train), std::move(val), std::move(report)};
}

}  // namespace corpusforge
