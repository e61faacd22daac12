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
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "corpusforge/cer.hpp"
#include "corpusforge/corpus.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

struct EmbeddingVector {
  std::string id;
  std::vector<double> values;

  size_t dim() const { return values.size(); }
};

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "dimensions " + std::to_string(a.size()) +
                                                  " and " + std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw Error(ErrorKind::ZeroNorm, "cosine similarity of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

/// Embedding files are JSONL: {"id": str, "dim": int, "vec": [float, ...]}.
inline std::vector<EmbeddingVector> parse_embeddings(std::string_view data) {
  std::vector<EmbeddingVector> out;
  const auto lines = split_lines(data);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const std::string where = "line " + std::to_string(i + 1);
    EmbeddingVector e;
    size_t dim = 0;
    try {
      const auto j = nlohmann::json::parse(lines[i]);
      e.id = j.at("id").get<std::string>();
      dim = j.at("dim").get<size_t>();
      e.values = j.at("vec").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::MalformedLine, where + ": " + ex.what());
    }
    if (dim == 0 || dim != e.values.size()) {
      throw Error(ErrorKind::MalformedLine,
                  where + ": dim " + std::to_string(dim) + " but vec has " +
                      std::to_string(e.values.size()) + " values");
    }
    if (!std::all_of(e.values.begin(), e.values.end(),
                     [](double v) { return std::isfinite(v); })) {
      throw Error(ErrorKind::MalformedLine, where + ": non-finite value");
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<EmbeddingVector> load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path));
}

// ---------------------------------------------------------------------------
// Reports

struct MetricSummary {
  double sum = 0.0;
  size_t count = 0;

  void add(double v) {
    sum += v;
    ++count;
  }
  std::optional<double> mean() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
};

struct SpeakerEval {
  MetricSummary cer;
  MetricSummary cosine;
};

/// Per-speaker and overall metrics. Overall values are item-weighted, i.e.
/// the mean over all items rather than the mean of speaker means.
struct EvalReport {
  std::map<std::string, SpeakerEval> per_speaker;
  SpeakerEval overall;
  std::string provenance;

  void merge(const EvalReport& other) {
    for (const auto& [spk, e] : other.per_speaker) {
      auto& mine = per_speaker[spk];
      mine.cer.sum += e.cer.sum;
      mine.cer.count += e.cer.count;
      mine.cosine.sum += e.cosine.sum;
      mine.cosine.count += e.cosine.count;
    }
    overall.cer.sum += other.overall.cer.sum;
    overall.cer.count += other.overall.cer.count;
    overall.cosine.sum += other.overall.cosine.sum;
    overall.cosine.count += other.overall.cosine.count;
    if (provenance.empty()) provenance = other.provenance;
  }
};

inline constexpr std::string_view kCosineNote =
    "higher cosine similarity means better speaker identity retention";
inline constexpr std::string_view kCerNote =
    "lower CER means better content quality";

/// Mean CER per speaker. Records whose id has no speaker are ignored.
inline EvalReport cer_report(std::span<const CerRecord> records,
                             const std::map<std::string, std::string>& speaker_of) {
  EvalReport r;
  // Sum in id order so the floating-point result does not depend on input
  // order.
  std::vector<const CerRecord*> sorted;
  for (const auto& rec : records) sorted.push_back(&rec);
  std::sort(sorted.begin(), sorted.end(),
            [](const CerRecord* a, const CerRecord* b) { return a->id < b->id; });
  for (const auto* rec : sorted) {
    auto it = speaker_of.find(rec->id);
    if (it == speaker_of.end()) continue;
    r.per_speaker[it->second].cer.add(rec->cer);
    r.overall.cer.add(rec->cer);
  }
  return r;
}

enum class CosineAggregate { mean, max };

inline CosineAggregate parse_aggregate(std::string_view s) {
  if (s == "mean") return CosineAggregate::mean;
  if (s == "max") return CosineAggregate::max;
  throw Error(ErrorKind::ConfigInvalid, "aggregate must be mean or max");
}

/// Scores each synthesized embedding against every ground-truth embedding of
/// the same speaker and aggregates those cosines (mean by default).
inline EvalReport speaker_similarity_report(
    std::span<const EmbeddingVector> synth, std::span<const EmbeddingVector> truth,
    const std::map<std::string, std::string>& synth_speaker,
    const std::map<std::string, std::string>& truth_speaker,
    CosineAggregate aggregate = CosineAggregate::mean, std::string provenance = {}) {
  std::map<std::string, std::vector<const EmbeddingVector*>> truth_by_speaker;
  for (const auto& t : truth) {
    auto it = truth_speaker.find(t.id);
    if (it != truth_speaker.end()) truth_by_speaker[it->second].push_back(&t);
  }
  std::vector<const EmbeddingVector*> items;
  for (const auto& s : synth) items.push_back(&s);
  std::sort(items.begin(), items.end(),
            [](const EmbeddingVector* a, const EmbeddingVector* b) { return a->id < b->id; });

  EvalReport r;
  r.provenance = std::move(provenance);
  for (const auto* s : items) {
    auto spk = synth_speaker.find(s->id);
    if (spk == synth_speaker.end()) {
      throw Error(ErrorKind::UnknownId, "synthesized item '" + s->id + "' has no speaker");
    }
    auto refs = truth_by_speaker.find(spk->second);
    if (refs == truth_by_speaker.end()) {
      throw Error(ErrorKind::MissingTruth,
                  "speaker '" + spk->second + "' has no ground-truth embedding");
    }
    double acc = aggregate == CosineAggregate::mean ? 0.0 : -1.0;
    for (const auto* t : refs->second) {
      const double c = cosine_similarity(*s, *t);
      acc = aggregate == CosineAggregate::mean ? acc + c : std::max(acc, c);
    }
    const double score = aggregate == CosineAggregate::mean
                             ? acc / static_cast<double>(refs->second.size())
                             : acc;
    r.per_speaker[spk->second].cosine.add(score);
    r.overall.cosine.add(score);
  }
  return r;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  auto summary = [](const SpeakerEval& e) {
    nlohmann::ordered_json j;
    const auto cer = e.cer.mean();
    const auto cos = e.cosine.mean();
    j["mean_cer"] = cer ? nlohmann::ordered_json(*cer) : nlohmann::ordered_json(nullptr);
    j["cer_items"] = e.cer.count;
    j["mean_cosine"] = cos ? nlohmann::ordered_json(*cos) : nlohmann::ordered_json(nullptr);
    j["cosine_items"] = e.cosine.count;
    return j;
  };
  nlohmann::ordered_json j;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [spk, e] : r.per_speaker) per[spk] = summary(e);
  j["per_speaker"] = std::move(per);
  j["overall"] = summary(r.overall);
  j["notes"] = {kCerNote, kCosineNote};
  j["provenance"] = r.provenance;
  return j;
}

/// Speaker rows with CER and Cosine Sim columns, then an overall row.
inline std::string render_eval_table(const EvalReport& r) {
  size_t width = std::string_view("speaker").size();
  for (const auto& [spk, e] : r.per_speaker) width = std::max(width, spk.size());
  std::ostringstream os;
  auto cell = [](const MetricSummary& m, int precision) {
    const auto v = m.mean();
    if (!v) return std::string("-");
    std::ostringstream c;
    c << std::fixed << std::setprecision(precision) << *v;
    return c.str();
  };
  auto row = [&](std::string_view name, std::string_view cer, std::string_view cos,
                 std::string_view n) {
    os << std::left << std::setw(static_cast<int>(width)) << name << std::right << "  "
       << std::setw(8) << cer << "  " << std::setw(10) << cos << "  " << std::setw(6) << n
       << '\n';
  };
  row("speaker", "CER", "Cosine Sim", "items");
  for (const auto& [spk, e] : r.per_speaker) {
    row(spk, cell(e.cer, 4), cell(e.cosine, 4),
        std::to_string(std::max(e.cer.count, e.cosine.count)));
  }
  row("overall", cell(r.overall.cer, 4), cell(r.overall.cosine, 4),
      std::to_string(std::max(r.overall.cer.count, r.overall.cosine.count)));
  os << "note: " << kCerNote << "; " << kCosineNote << '\n';
  if (!r.provenance.empty()) os << "embeddings: " << r.provenance << '\n';
  return os.str();
}

}  // namespace corpusforge
