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

#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"

#include "corpusforge/corpus.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/text.hpp"

namespace corpusforge {

struct CleaningCounts {
  size_t empty_removed = 0;
  size_t duplicates_removed = 0;
  size_t newlines_stripped = 0;
  size_t separators_fixed = 0;

  CleaningCounts& operator+=(const CleaningCounts& o) {
    empty_removed += o.empty_removed;
    duplicates_removed += o.duplicates_removed;
    newlines_stripped += o.newlines_stripped;
    separators_fixed += o.separators_fixed;
    return *this;
  }
  bool operator==(const CleaningCounts&) const = default;
  bool is_zero() const { return *this == CleaningCounts{}; }
};

/// Global counts plus a per-speaker breakdown. Always mutate through add()
/// so the global counts stay equal to the per-speaker sums.
struct CleaningReport {
  CleaningCounts total;
  std::map<std::string, CleaningCounts> per_speaker;

  void add(const std::string& speaker, const CleaningCounts& delta) {
    total += delta;
    per_speaker[speaker] += delta;
  }

  CleaningReport& operator+=(const CleaningReport& o) {
    for (const auto& [spk, c] : o.per_speaker) add(spk, c);
    return *this;
  }

  bool is_zero() const { return total.is_zero(); }
  bool operator==(const CleaningReport&) const = default;
};

template <typename T>
struct PassResult {
  Manifest manifest;
  T report;
};

using CleanResult = PassResult<CleaningReport>;

// ---------------------------------------------------------------------------
// Passes

/// Probe returning true when the utterance's audio counts as empty.
using EmptinessProbe = std::function<bool(const Utterance&)>;

inline CleanResult remove_empty(const Manifest& m, const EmptinessProbe& is_empty) {
  CleanResult r{{{}, m.split, m.created_from}, {}};
  for (const auto& u : m.utterances) {
    bool empty = false;
    try {
      empty = is_empty(u);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::ProbeFailure, "utterance '" + u.id + "': " + e.what());
    }
    if (empty) {
      r.report.add(u.speaker_id, {.empty_removed = 1});
    } else {
      r.manifest.utterances.push_back(u);
    }
  }
  return r;
}

/// Keeps the first utterance (by id) of each speaker's whitespace-normalized
/// transcript; later repeats are dropped. Other speakers are unaffected.
inline CleanResult dedupe_transcripts(const Manifest& m) {
  CleanResult r{{{}, m.split, m.created_from}, {}};
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& u : m.utterances) {
    auto key = std::make_pair(u.speaker_id, text::collapse_whitespace(u.transcript));
    if (!seen.insert(std::move(key)).second) {
      r.report.add(u.speaker_id, {.duplicates_removed = 1});
    } else {
      r.manifest.utterances.push_back(u);
    }
  }
  return r;
}

/// Replaces CR/LF with spaces, collapses whitespace, and trims. Transcripts
/// without line breaks are left untouched.
inline CleanResult strip_newlines(const Manifest& m) {
  CleanResult r{m, {}};
  for (auto& u : r.manifest.utterances) {
    if (u.transcript.find_first_of("\r\n") == std::string::npos) continue;
    u.transcript = text::collapse_whitespace(u.transcript);
    r.report.add(u.speaker_id, {.newlines_stripped = 1});
  }
  return r;
}

struct SeparatorPolicy {
  std::set<std::string> languages{"hi", "mr", "bn", "hne"};
  char32_t from_char = U'|';      // U+007C VERTICAL LINE
  char32_t to_char = U'\u0964';  // DEVANAGARI DANDA
};

inline void validate(const SeparatorPolicy& p) {
  if (p.from_char == p.to_char) {
    throw Error(ErrorKind::ConfigInvalid, "separator.from_char equals separator.to_char");
  }
}

inline CleanResult fix_separators(const Manifest& m, const SeparatorPolicy& policy = {}) {
  validate(policy);
  CleanResult r{m, {}};
  for (auto& u : r.manifest.utterances) {
    if (!policy.languages.contains(u.language)) continue;
    std::u32string cps = text::decode_utf8(u.transcript);
    size_t fixed = 0;
    for (char32_t& cp : cps) {
      if (cp == policy.from_char) {
        cp = policy.to_char;
        ++fixed;
      }
    }
    if (fixed == 0) continue;
    u.transcript = text::encode_utf8(cps);
    r.report.add(u.speaker_id, {.separators_fixed = fixed});
  }
  return r;
}

/// The transcript passes in their fixed order: strip_newlines,
/// fix_separators, dedupe_transcripts, then remove_empty.
inline CleanResult clean_all(const Manifest& m, const SeparatorPolicy& policy,
                             const EmptinessProbe& is_empty) {
  CleanResult r = strip_newlines(m);
  auto fixed = fix_separators(r.manifest, policy);
  r.report += fixed.report;
  auto deduped = dedupe_transcripts(fixed.manifest);
  r.report += deduped.report;
  auto nonempty = remove_empty(deduped.manifest, is_empty);
  r.report += nonempty.report;
  r.manifest = std::move(nonempty.manifest);
  return r;
}

// ---------------------------------------------------------------------------
// Report rendering

inline nlohmann::ordered_json to_json(const CleaningCounts& c) {
  nlohmann::ordered_json j;
  j["empty_removed"] = c.empty_removed;
  j["duplicates_removed"] = c.duplicates_removed;
  j["newlines_stripped"] = c.newlines_stripped;
  j["separators_fixed"] = c.separators_fixed;
  return j;
}

inline nlohmann::ordered_json to_json(const CleaningReport& r) {
  nlohmann::ordered_json j = to_json(r.total);
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [spk, c] : r.per_speaker) per[spk] = to_json(c);
  j["per_speaker"] = std::move(per);
  return j;
}

/// Table with one row per speaker. The "notes" line lists nonzero removals
/// per speaker, e.g. "empty audio: 1 in hi_m, 4 in te_f".
inline std::string render_cleaning_table(const CleaningReport& r) {
  size_t width = std::string_view("speaker").size();
  for (const auto& [spk, c] : r.per_speaker) width = std::max(width, spk.size());
  std::ostringstream os;
  auto row = [&](std::string_view name, const CleaningCounts& c) {
    os << std::left << std::setw(static_cast<int>(width)) << name << std::right
       << "  " << std::setw(6) << c.empty_removed << "  " << std::setw(10)
       << c.duplicates_removed << "  " << std::setw(8) << c.newlines_stripped
       << "  " << std::setw(10) << c.separators_fixed << '\n';
  };
  os << std::left << std::setw(static_cast<int>(width)) << "speaker" << std::right
     << "  " << std::setw(6) << "empty" << "  " << std::setw(10) << "duplicates"
     << "  " << std::setw(8) << "newlines" << "  " << std::setw(10)
     << "separators" << '\n';
  for (const auto& [spk, c] : r.per_speaker) row(spk, c);
  row("total", r.total);

  auto prose = [&](std::string_view label, size_t CleaningCounts::*field) {
    std::string parts;
    for (const auto& [spk, c] : r.per_speaker) {
      if (c.*field == 0) continue;
      if (!parts.empty()) parts += ", ";
      parts += std::to_string(c.*field) + " in " + spk;
    }
    if (!parts.empty()) os << label << ": " << parts << '\n';
  };
  prose("empty audio", &CleaningCounts::empty_removed);
  prose("duplicate transcripts", &CleaningCounts::duplicates_removed);
  prose("newlines stripped", &CleaningCounts::newlines_stripped);
  prose("separators fixed", &CleaningCounts::separators_fixed);
  return os.str();
}

}  // namespace corpusforge
