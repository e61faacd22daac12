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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "corpusforge/error.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

struct Utterance {
  std::string id;
  std::string speaker_id;
  std::string language;
  std::string audio_path;
  std::string transcript;
  double duration_s = 0.0;
  int sample_rate = 0;

  bool operator==(const Utterance&) const = default;
};

enum class Split { all, train, val };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::all: return "all";
    case Split::train: return "train";
    case Split::val: return "val";
  }
  return "all";
}

inline Split parse_split(std::string_view s) {
  if (s == "all") return Split::all;
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  throw Error(ErrorKind::MalformedLine, "unknown split '" + std::string(s) + "'");
}

/// Ordered collection of utterances. Every constructor path goes through
/// canonicalize(), so `utterances` is always sorted by id with no duplicates.
struct Manifest {
  std::vector<Utterance> utterances;
  Split split = Split::all;
  std::string created_from;

  bool operator==(const Manifest&) const = default;

  size_t size() const { return utterances.size(); }
  bool empty() const { return utterances.empty(); }
};

/// Sorts by id and rejects duplicate ids.
inline void canonicalize(Manifest& m) {
  std::sort(m.utterances.begin(), m.utterances.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  auto dup = std::adjacent_find(
      m.utterances.begin(), m.utterances.end(),
      [](const Utterance& a, const Utterance& b) { return a.id == b.id; });
  if (dup != m.utterances.end()) {
    throw Error(ErrorKind::DuplicateId, "duplicate utterance id '" + dup->id + "'");
  }
}

inline Manifest make_manifest(std::vector<Utterance> utts,
                              Split split = Split::all,
                              std::string created_from = {}) {
  Manifest m{std::move(utts), split, std::move(created_from)};
  canonicalize(m);
  return m;
}

/// Copy of `m` keeping the utterances for which keep(u) is true.
template <typename Pred>
Manifest filter_manifest(const Manifest& m, Pred&& keep) {
  Manifest out{{}, m.split, m.created_from};
  for (const auto& u : m.utterances) {
    if (keep(u)) out.utterances.push_back(u);
  }
  return out;
}

inline std::vector<std::string> speakers_of(const Manifest& m) {
  std::set<std::string> s;
  for (const auto& u : m.utterances) s.insert(u.speaker_id);
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// JSONL serialization

inline nlohmann::ordered_json to_json(const Utterance& u) {
  nlohmann::ordered_json j;
  j["id"] = u.id;
  j["speaker_id"] = u.speaker_id;
  j["language"] = u.language;
  j["audio_path"] = u.audio_path;
  j["transcript"] = u.transcript;
  j["duration_s"] = u.duration_s;
  j["sample_rate"] = u.sample_rate;
  return j;
}

/// Compact UTF-8 dump; non-ASCII is written raw rather than \u-escaped.
template <typename Json>
std::string dump_line(const Json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

struct LoadOptions {
  /// When false, duration_s and sample_rate may be absent (raw filelists fed
  /// to `scan`, which probes the audio to fill them in).
  bool require_audio_fields = true;
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j,
                                           const char* field, size_t line) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) {
    throw Error(ErrorKind::MissingField, "line " + std::to_string(line) +
                                             ": missing field \"" + field +
                                             "\"");
  }
  return *it;
}

inline std::string string_field(const nlohmann::json& j, const char* field,
                                size_t line) {
  const auto& v = require_field(j, field, line);
  if (!v.is_string()) {
    throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line) +
                                              ": field \"" + field +
                                              "\" must be a string");
  }
  return v.get<std::string>();
}

inline std::filesystem::path meta_path(const std::filesystem::path& p) {
  std::filesystem::path meta = p;
  meta += ".meta.json";
  return meta;
}

}  // namespace detail

inline Utterance parse_utterance(std::string_view line, size_t line_no,
                                 const LoadOptions& opts = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedLine,
                "line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorKind::MalformedLine,
                "line " + std::to_string(line_no) + ": not a JSON object");
  }
  Utterance u;
  u.id = detail::string_field(j, "id", line_no);
  u.speaker_id = detail::string_field(j, "speaker_id", line_no);
  u.language = detail::string_field(j, "language", line_no);
  u.audio_path = detail::string_field(j, "audio_path", line_no);
  u.transcript = detail::string_field(j, "transcript", line_no);
  const bool has_audio_fields = j.contains("duration_s") || j.contains("sample_rate");
  if (opts.require_audio_fields || has_audio_fields) {
    const auto& d = detail::require_field(j, "duration_s", line_no);
    const auto& sr = detail::require_field(j, "sample_rate", line_no);
    if (!d.is_number() || !sr.is_number_integer()) {
      throw Error(ErrorKind::MalformedLine,
                  "line " + std::to_string(line_no) +
                      ": duration_s must be a number and sample_rate an integer");
    }
    u.duration_s = d.get<double>();
    u.sample_rate = sr.get<int>();
    if (!(u.duration_s >= 0.0) || !std::isfinite(u.duration_s) || u.sample_rate <= 0) {
      throw Error(ErrorKind::MalformedLine,
                  "line " + std::to_string(line_no) +
                      ": duration_s must be >= 0 and sample_rate > 0");
    }
  }
  if (u.id.empty() || u.speaker_id.empty()) {
    throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) +
                                              ": id and speaker_id must be non-empty");
  }
  return u;
}

inline std::string serialize_manifest(const Manifest& m) {
  std::string out;
  for (const auto& u : m.utterances) {
    out += dump_line(to_json(u));
    out += '\n';
  }
  return out;
}

inline Manifest parse_manifest(std::string_view data, const LoadOptions& opts = {}) {
  Manifest m;
  const auto lines = split_lines(data);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    m.utterances.push_back(parse_utterance(lines[i], i + 1, opts));
  }
  canonicalize(m);
  return m;
}

/// Reads a JSONL manifest. split and created_from come from the optional
/// "<path>.meta.json" sidecar written by save_manifest.
inline Manifest load_manifest(const std::filesystem::path& path,
                              const LoadOptions& opts = {}) {
  Manifest m = parse_manifest(read_file(path), opts);
  m.created_from = path.string();
  const auto meta = detail::meta_path(path);
  if (std::filesystem::exists(meta)) {
    try {
      const auto j = nlohmann::json::parse(read_file(meta));
      m.split = parse_split(j.at("split").get<std::string>());
      m.created_from = j.at("created_from").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedLine, meta.string() + ": " + e.what());
    }
  }
  return m;
}

/// Writes `m` as JSONL in canonical id order plus the metadata sidecar.
/// Output bytes depend only on the manifest contents.
inline void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  Manifest sorted = m;
  canonicalize(sorted);
  write_file(path, serialize_manifest(sorted));
  nlohmann::ordered_json meta;
  meta["split"] = std::string(to_string(m.split));
  meta["created_from"] = m.created_from;
  write_file(detail::meta_path(path), dump_line(meta) + "\n");
}

// ---------------------------------------------------------------------------
// Dataset statistics

struct SpeakerStats {
  std::string speaker_id;
  size_t file_count = 0;
  /// Full precision; round only for display.
  double hours = 0.0;

  double rounded_hours() const { return std::round(hours * 100.0) / 100.0; }
};

struct DatasetStats {
  std::vector<SpeakerStats> speakers;  // sorted by speaker_id
  SpeakerStats total{"total", 0, 0.0};
};

inline DatasetStats compute_stats(const Manifest& m) {
  std::map<std::string, std::pair<size_t, double>> acc;
  for (const auto& u : m.utterances) {
    auto& [count, seconds] = acc[u.speaker_id];
    ++count;
    seconds += u.duration_s;
  }
  DatasetStats stats;
  double total_seconds = 0.0;
  for (const auto& [spk, entry] : acc) {
    stats.speakers.push_back({spk, entry.first, entry.second / 3600.0});
    stats.total.file_count += entry.first;
    total_seconds += entry.second;
  }
  stats.total.hours = total_seconds / 3600.0;
  return stats;
}

inline std::string format_hours(double hours) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << std::round(hours * 100.0) / 100.0;
  return os.str();
}

/// Aligned text table: one row per speaker followed by the totals row.
inline std::string render_stats_table(const DatasetStats& stats) {
  size_t width = std::string_view("speaker").size();
  for (const auto& s : stats.speakers) width = std::max(width, s.speaker_id.size());
  width = std::max(width, stats.total.speaker_id.size());
  std::ostringstream os;
  auto row = [&](std::string_view name, std::string_view files, std::string_view hours) {
    os << std::left << std::setw(static_cast<int>(width)) << name << "  "
       << std::right << std::setw(8) << files << "  " << std::setw(8) << hours
       << '\n';
  };
  row("speaker", "files", "hours");
  for (const auto& s : stats.speakers) {
    row(s.speaker_id, std::to_string(s.file_count), format_hours(s.hours));
  }
  row(stats.total.speaker_id, std::to_string(stats.total.file_count),
      format_hours(stats.total.hours));
  return os.str();
}

/// One-line summary in the "<speaker>, <n> files, <h> hours" shape.
inline std::string render_stats_line(const SpeakerStats& s) {
  return s.speaker_id + ", " + std::to_string(s.file_count) + " files, " +
         format_hours(s.hours) + " hours";
}

inline std::string render_stats_jsonl(const DatasetStats& stats) {
  std::string out;
  auto line = [&](const SpeakerStats& s) {
    nlohmann::ordered_json j;
    j["speaker_id"] = s.speaker_id;
    j["file_count"] = s.file_count;
    j["hours"] = s.rounded_hours();
    out += dump_line(j) + "\n";
  };
  for (const auto& s : stats.speakers) line(s);
  line(stats.total);
  return out;
}

// ---------------------------------------------------------------------------
// Train / val split

struct SplitConfig {
  double val_fraction = 0.01;
  uint64_t seed = 0;
};

/// Validation count for a speaker with n files: ceil(fraction * n), at least
/// one when n >= 2, never the whole speaker, and zero for single-file
/// speakers.
inline size_t val_count_for(size_t n, double val_fraction) {
  if (n < 2) return 0;
  // The epsilon absorbs products like 0.07 * 100 = 7.000000000000001.
  auto k = static_cast<size_t>(std::ceil(val_fraction * static_cast<double>(n) - 1e-9));
  return std::clamp<size_t>(k, 1, n - 1);
}

inline std::pair<Manifest, Manifest> split_train_val(const Manifest& m,
                                                     const SplitConfig& cfg) {
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "split.val_fraction must be in (0, 1)");
  }
  std::map<std::string, std::vector<std::pair<uint64_t, size_t>>> by_speaker;
  for (size_t i = 0; i < m.utterances.size(); ++i) {
    const auto& u = m.utterances[i];
    by_speaker[u.speaker_id].emplace_back(seeded_hash(cfg.seed, u.id), i);
  }
  std::vector<bool> is_val(m.utterances.size(), false);
  for (auto& [spk, keyed] : by_speaker) {
    // Ties on the hash fall back to id order, which is the index order.
    std::sort(keyed.begin(), keyed.end());
    const size_t k = val_count_for(keyed.size(), cfg.val_fraction);
    for (size_t j = 0; j < k; ++j) is_val[keyed[j].second] = true;
  }
  Manifest train{{}, Split::train, m.created_from};
  Manifest val{{}, Split::val, m.created_from};
  for (size_t i = 0; i < m.utterances.size(); ++i) {
    (is_val[i] ? val : train).utterances.push_back(m.utterances[i]);
  }
  return {std::move(train), std::move(val)};
}

}  // namespace corpusforge
