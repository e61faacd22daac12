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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "json.hpp"

#include "corpusforge/audio.hpp"
#include "corpusforge/clean.hpp"
#include "corpusforge/corpus.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/prompt.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

enum class LogLevel { error, warn, info, debug };

inline LogLevel parse_log_level(std::string_view s) {
  if (s == "error") return LogLevel::error;
  if (s == "warn") return LogLevel::warn;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  throw Error(ErrorKind::ConfigInvalid, "log_level must be error, warn, info or debug");
}

inline std::string_view to_string(LogLevel l) {
  switch (l) {
    case LogLevel::error: return "error";
    case LogLevel::warn: return "warn";
    case LogLevel::info: return "info";
    case LogLevel::debug: return "debug";
  }
  return "info";
}

struct PipelineConfig {
  std::filesystem::path corpus_root = ".";
  std::filesystem::path manifest = "manifest.jsonl";
  std::filesystem::path out_dir = "out";
  unsigned workers = default_workers();
  uint64_t seed = 0;
  TrimSpec trim;
  double target_peak = kDefaultTargetPeak;
  SeparatorPolicy separator;
  size_t cer_top_n = 8000;
  double min_duration_s = kDefaultMinDurationS;
  PromptSpec prompt;
  SplitConfig split;
  /// Sidecar hypothesis file (.tsv/.jsonl); takes precedence over asr_endpoint.
  std::optional<std::filesystem::path> hypotheses;
  std::optional<std::string> asr_endpoint;
  bool cer_casefold = false;
  bool cer_normalize = true;
  LogLevel log_level = LogLevel::info;

  /// Paths in the config are relative to corpus_root.
  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : corpus_root / p;
  }
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, const std::string& name, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::ConfigInvalid, "field '" + name + "' has the wrong type");
  }
}

}  // namespace detail

/// Overlays the fields present in `j` onto `cfg`. Unknown keys are rejected
/// so typos do not silently fall back to defaults.
inline void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j) {
  using detail::read_field;
  if (!j.is_object()) throw Error(ErrorKind::ConfigInvalid, "config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "corpus_root", "manifest", "out_dir", "workers", "seed", "trim", "target_peak",
      "separator", "cer_top_n", "min_duration_s", "prompt", "split", "hypotheses",
      "asr_endpoint", "cer_casefold", "cer_normalize", "log_level"};
  for (const auto& [key, _] : j.items()) {
    if (!kKnown.contains(key)) {
      throw Error(ErrorKind::ConfigInvalid, "unknown field '" + key + "'");
    }
  }
  std::string s;
  if (j.contains("corpus_root")) {
    read_field(j, "corpus_root", "corpus_root", s);
    cfg.corpus_root = s;
  }
  if (j.contains("manifest")) {
    read_field(j, "manifest", "manifest", s);
    cfg.manifest = s;
  }
  if (j.contains("out_dir")) {
    read_field(j, "out_dir", "out_dir", s);
    cfg.out_dir = s;
  }
  if (j.contains("hypotheses")) {
    read_field(j, "hypotheses", "hypotheses", s);
    cfg.hypotheses = s;
  }
  if (j.contains("asr_endpoint")) {
    read_field(j, "asr_endpoint", "asr_endpoint", s);
    cfg.asr_endpoint = s;
  }
  if (j.contains("log_level")) {
    read_field(j, "log_level", "log_level", s);
    cfg.log_level = parse_log_level(s);
  }
  read_field(j, "workers", "workers", cfg.workers);
  if (j.contains("seed")) {
    // The global seed seeds every stage unless a nested block overrides it.
    read_field(j, "seed", "seed", cfg.seed);
    cfg.split.seed = cfg.seed;
    cfg.prompt.seed = cfg.seed;
  }
  read_field(j, "target_peak", "target_peak", cfg.target_peak);
  read_field(j, "cer_top_n", "cer_top_n", cfg.cer_top_n);
  read_field(j, "min_duration_s", "min_duration_s", cfg.min_duration_s);
  read_field(j, "cer_casefold", "cer_casefold", cfg.cer_casefold);
  read_field(j, "cer_normalize", "cer_normalize", cfg.cer_normalize);
  if (auto it = j.find("trim"); it != j.end()) {
    read_field(*it, "threshold_db", "trim.threshold_db", cfg.trim.threshold_db);
    read_field(*it, "pad_s", "trim.pad_s", cfg.trim.pad_s);
    read_field(*it, "frame_len", "trim.frame_len", cfg.trim.frame_len);
    read_field(*it, "hop_len", "trim.hop_len", cfg.trim.hop_len);
  }
  if (auto it = j.find("separator"); it != j.end()) {
    read_field(*it, "languages", "separator.languages", cfg.separator.languages);
  }
  if (auto it = j.find("prompt"); it != j.end()) {
    read_field(*it, "min_source_s", "prompt.min_source_s", cfg.prompt.min_source_s);
    read_field(*it, "max_source_s", "prompt.max_source_s", cfg.prompt.max_source_s);
    read_field(*it, "crop_s", "prompt.crop_s", cfg.prompt.crop_s);
    read_field(*it, "seed", "prompt.seed", cfg.prompt.seed);
  }
  if (auto it = j.find("split"); it != j.end()) {
    read_field(*it, "val_fraction", "split.val_fraction", cfg.split.val_fraction);
    read_field(*it, "seed", "split.seed", cfg.split.seed);
  }
}

inline void validate(const PipelineConfig& cfg) {
  if (cfg.workers < 1) throw Error(ErrorKind::ConfigInvalid, "workers must be >= 1");
  if (cfg.cer_top_n < 1) throw Error(ErrorKind::ConfigInvalid, "cer_top_n must be >= 1");
  if (!(cfg.min_duration_s >= 0.0)) {
    throw Error(ErrorKind::ConfigInvalid, "min_duration_s must be >= 0");
  }
  if (!(cfg.target_peak > 0.0 && cfg.target_peak <= 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "target_peak must be in (0, 1]");
  }
  if (!(cfg.split.val_fraction > 0.0 && cfg.split.val_fraction < 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "split.val_fraction must be in (0, 1)");
  }
  validate(cfg.trim);
  validate(cfg.separator);
  validate(cfg.prompt);
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ": " + e.what());
  }
  apply_config_json(cfg, j);
  return cfg;
}

}  // namespace corpusforge
