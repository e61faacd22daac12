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
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "corpusforge/corpus.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/text.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

/// Levenshtein distance with unit costs over any sequence of comparable
/// elements. Two-row dynamic program, O(|a|·|b|) time, O(min) memory.
template <typename Seq>
size_t levenshtein(const Seq& a, const Seq& b) {
  const Seq& shorter = a.size() <= b.size() ? a : b;
  const Seq& longer = a.size() <= b.size() ? b : a;
  std::vector<size_t> prev(shorter.size() + 1);
  std::vector<size_t> cur(shorter.size() + 1);
  std::iota(prev.begin(), prev.end(), size_t{0});
  for (size_t i = 1; i <= longer.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= shorter.size(); ++j) {
      const size_t sub = prev[j - 1] + (longer[i - 1] == shorter[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[shorter.size()];
}

/// Edit distance between two UTF-8 strings, counted in Unicode scalar values.
inline size_t edit_distance(std::string_view a, std::string_view b) {
  return levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

struct CerOptions {
  /// NFC plus whitespace collapse and trim.
  bool normalize = true;
  /// Lowercase both sides; only meaningful for cased scripts.
  bool casefold = false;
};

struct CerRecord {
  std::string id;
  std::string reference;   // as compared, i.e. after normalization
  std::string hypothesis;
  size_t distance = 0;
  double cer = 0.0;

  bool operator==(const CerRecord&) const = default;
};

inline std::string normalize_for_cer(std::string_view s, const CerOptions& opts) {
  std::string out(s);
  if (opts.normalize) out = text::collapse_whitespace(text::nfc(out));
  if (opts.casefold) out = text::lowercase(out);
  return out;
}

inline CerRecord cer(std::string_view reference, std::string_view hypothesis,
                     const CerOptions& opts = {}) {
  CerRecord r;
  r.reference = normalize_for_cer(reference, opts);
  r.hypothesis = normalize_for_cer(hypothesis, opts);
  const std::u32string ref = text::decode_utf8(r.reference);
  if (ref.empty()) {
    throw Error(ErrorKind::EmptyReference, "reference transcript is empty");
  }
  r.distance = levenshtein(ref, text::decode_utf8(r.hypothesis));
  r.cer = static_cast<double>(r.distance) / static_cast<double>(ref.size());
  return r;
}

// ---------------------------------------------------------------------------
// Top-N selection

struct ScoredItem {
  std::string speaker_id;
  std::string id;
  double cer = 0.0;
};

/// Per speaker, the n items with the lowest CER (ties broken by id). Returns
/// the selected items grouped by speaker, each group in ranking order.
inline std::vector<ScoredItem> select_top_n(std::span<const ScoredItem> items, size_t n) {
  std::vector<ScoredItem> ranked(items.begin(), items.end());
  std::sort(ranked.begin(), ranked.end(), [](const ScoredItem& a, const ScoredItem& b) {
    return std::tie(a.speaker_id, a.cer, a.id) < std::tie(b.speaker_id, b.cer, b.id);
  });
  std::vector<ScoredItem> out;
  size_t taken = 0;
  for (size_t i = 0; i < ranked.size(); ++i) {
    if (i == 0 || ranked[i].speaker_id != ranked[i - 1].speaker_id) taken = 0;
    if (taken < n) {
      out.push_back(ranked[i]);
      ++taken;
    }
  }
  return out;
}

struct SelectionReport {
  size_t selected = 0;
  size_t dropped_by_rank = 0;
  /// Utterances with no CER record (no hypothesis, or empty reference).
  size_t unscored = 0;
  /// CER records whose id is not in the manifest.
  size_t unmatched_records = 0;
};

/// Joins CER records to the manifest and keeps the n best per speaker.
inline Manifest select_top_n(const Manifest& m, std::span<const CerRecord> records,
                             size_t n, SelectionReport* report = nullptr) {
  std::unordered_map<std::string_view, const Utterance*> by_id;
  for (const auto& u : m.utterances) by_id.emplace(u.id, &u);
  SelectionReport rep;
  std::vector<ScoredItem> items;
  std::set<std::string_view> scored;
  for (const auto& r : records) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      ++rep.unmatched_records;
      continue;
    }
    items.push_back({it->second->speaker_id, r.id, r.cer});
    scored.insert(it->first);
  }
  rep.unscored = m.size() - scored.size();
  const auto chosen = select_top_n(items, n);
  std::set<std::string> keep;
  for (const auto& c : chosen) keep.insert(c.id);
  rep.selected = keep.size();
  rep.dropped_by_rank = items.size() - keep.size();
  if (report) *report = rep;
  return filter_manifest(m, [&](const Utterance& u) { return keep.contains(u.id); });
}

// ---------------------------------------------------------------------------
// Hypothesis files

struct HypothesisRecord {
  std::string id;
  std::string hypothesis;

  bool operator==(const HypothesisRecord&) const = default;
};

/// Reads "id<TAB>hypothesis" (.tsv) or {"id", "hypothesis"} (.jsonl) lines.
inline std::vector<HypothesisRecord> parse_hypotheses(std::string_view data,
                                                      bool jsonl) {
  std::vector<HypothesisRecord> out;
  std::set<std::string> seen;
  const auto lines = split_lines(data);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (is_blank(line)) continue;
    const std::string where = "line " + std::to_string(i + 1);
    HypothesisRecord rec;
    if (jsonl) {
      try {
        const auto j = nlohmann::json::parse(line);
        rec.id = j.at("id").get<std::string>();
        rec.hypothesis = j.at("hypothesis").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedLine, where + ": " + e.what());
      }
    } else {
      const size_t tab = line.find('\t');
      if (tab == std::string_view::npos) {
        throw Error(ErrorKind::MalformedLine, where + ": expected id<TAB>hypothesis");
      }
      rec.id = std::string(line.substr(0, tab));
      rec.hypothesis = std::string(line.substr(tab + 1));
    }
    if (rec.id.empty()) {
      throw Error(ErrorKind::MalformedLine, where + ": empty id");
    }
    text::decode_utf8(rec.hypothesis);
    if (!seen.insert(rec.id).second) {
      throw Error(ErrorKind::DuplicateHypothesis, "duplicate hypothesis for id '" + rec.id + "'");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<HypothesisRecord> ingest_hypotheses(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext != ".tsv" && ext != ".jsonl") {
    throw Error(ErrorKind::UnknownExtension,
                path.string() + ": expected .tsv or .jsonl, got '" + ext + "'");
  }
  return parse_hypotheses(read_file(path), ext == ".jsonl");
}

struct CerScoringReport {
  size_t scored = 0;
  size_t missing_hypothesis = 0;
  size_t empty_reference = 0;
  size_t unmatched_hypotheses = 0;
};

/// Scores every utterance that has a hypothesis, in manifest (id) order.
inline std::vector<CerRecord> score_manifest(const Manifest& m,
                                             std::span<const HypothesisRecord> hyps,
                                             const CerOptions& opts = {},
                                             CerScoringReport* report = nullptr) {
  std::unordered_map<std::string_view, std::string_view> by_id;
  for (const auto& h : hyps) by_id.emplace(h.id, h.hypothesis);
  CerScoringReport rep;
  std::vector<CerRecord> out;
  size_t matched = 0;
  for (const auto& u : m.utterances) {
    auto it = by_id.find(u.id);
    if (it == by_id.end()) {
      ++rep.missing_hypothesis;
      continue;
    }
    ++matched;
    try {
      CerRecord r = cer(u.transcript, it->second, opts);
      r.id = u.id;
      out.push_back(std::move(r));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyReference) throw;
      ++rep.empty_reference;
    }
  }
  rep.scored = out.size();
  rep.unmatched_hypotheses = hyps.size() - matched;
  if (report) *report = rep;
  return out;
}

/// CER records serialize as {"id", "cer", "distance"}.
inline std::string serialize_cer_records(std::span<const CerRecord> records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["cer"] = r.cer;
    j["distance"] = r.distance;
    out += dump_line(j) + "\n";
  }
  return out;
}

inline std::vector<CerRecord> parse_cer_records(std::string_view data) {
  std::vector<CerRecord> out;
  const auto lines = split_lines(data);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    try {
      const auto j = nlohmann::json::parse(lines[i]);
      CerRecord r;
      r.id = j.at("id").get<std::string>();
      r.cer = j.at("cer").get<double>();
      r.distance = j.at("distance").get<size_t>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedLine, "line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace corpusforge
