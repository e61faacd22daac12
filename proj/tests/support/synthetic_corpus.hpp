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

// Deterministic synthetic corpus for pipeline tests: tone bursts in silence,
// multilingual transcripts, and the defects the cleaning passes look for.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "corpusforge/audio.hpp"
#include "corpusforge/cer.hpp"
#include "corpusforge/corpus.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge::testing {

/// mt19937_64 output is fully specified by the standard; the distributions
/// are not, so map raw draws by hand to keep fixtures identical everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  size_t index(size_t n) { return static_cast<size_t>(gen_() % n); }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
};

/// Sine burst of `body` samples between `lead` and `tail` zero samples.
inline AudioBuffer tone_in_silence(int sample_rate, size_t lead, size_t body, size_t tail,
                                   double freq = 220.0, double amp = 0.5) {
  AudioBuffer a;
  a.sample_rate = sample_rate;
  a.samples.assign(lead + body + tail, 0.0);
  for (size_t i = 0; i < body; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    a.samples[lead + i] = amp * std::sin(2.0 * std::numbers::pi * freq * t);
  }
  return a;
}

struct SyntheticCorpus {
  std::filesystem::path root;
  std::filesystem::path manifest;    // raw, shuffled, no audio fields
  std::filesystem::path hypotheses;  // TSV
  size_t files = 0;
  size_t pipes = 0;
  size_t empty_files = 0;
  size_t silent_files = 0;
};

struct SyntheticSpec {
  size_t files = 200;
  int sample_rate = 16000;
  uint64_t seed = 7;
};

inline const std::vector<std::string>& words_for(const std::string& lang) {
  static const std::vector<std::string> hi = {"नमस्ते", "भारत", "आज", "मौसम", "अच्छा",
                                              "है", "हम", "घर", "जा", "रहे"};
  static const std::vector<std::string> te = {"నమస్కారం", "ఈ", "రోజు", "వాతావరణం",
                                              "బాగుంది", "మేము", "ఇంటికి", "వెళ్తున్నాము"};
  static const std::vector<std::string> en = {"the", "weather", "is", "good", "today",
                                              "we", "are", "going", "home", "now"};
  if (lang == "hi") return hi;
  if (lang == "te") return te;
  return en;
}

/// Writes a corpus of `spec.files` WAVs over 4 speakers in 3 languages.
inline SyntheticCorpus generate_corpus(const std::filesystem::path& root,
                                       const SyntheticSpec& spec = {}) {
  struct Speaker {
    const char* id;
    const char* lang;
    double freq;
  };
  static const Speaker kSpeakers[] = {
      {"hi_f", "hi", 240.0}, {"hi_m", "hi", 130.0}, {"te_f", "te", 260.0}, {"en_m", "en", 120.0}};

  Rng rng(spec.seed);
  SyntheticCorpus out;
  out.root = root;
  out.manifest = root / "raw_manifest.jsonl";
  out.hypotheses = root / "hypotheses.tsv";
  std::vector<std::string> lines;
  std::string hyp_tsv;
  std::vector<std::string> last_transcript(4);

  for (size_t n = 0; n < spec.files; ++n) {
    const size_t s = n % 4;
    const Speaker& spk = kSpeakers[s];
    Utterance u;
    u.id = std::string(spk.id) + "_" + std::to_string(1000 + n);
    u.speaker_id = spk.id;
    u.language = spk.lang;
    u.audio_path = std::string("wavs/") + spk.id + "/" + u.id + ".wav";

    const auto& vocab = words_for(spk.lang);
    std::string text;
    const size_t nwords = 3 + rng.index(6);
    for (size_t w = 0; w < nwords; ++w) {
      if (w) text += ' ';
      text += vocab[rng.index(vocab.size())];
    }
    if (u.language != "en" && rng.chance(0.3)) text += "|";
    if (rng.chance(0.05)) text += "\n" + vocab[0];
    if (n >= 4 && rng.chance(0.04)) text = last_transcript[s];  // duplicate
    last_transcript[s] = text;
    u.transcript = text;
    // Only languages in the default separator policy get their pipes fixed.
    if (u.language == "hi") out.pipes += static_cast<size_t>(std::count(text.begin(), text.end(), '|'));

    AudioBuffer audio;
    audio.sample_rate = spec.sample_rate;
    if (n == 17 || n == 101) {
      ++out.empty_files;  // zero-length data chunk
    } else if (n == 55) {
      ++out.silent_files;
      audio.samples.assign(static_cast<size_t>(spec.sample_rate), 0.0);
    } else {
      const auto sr = static_cast<double>(spec.sample_rate);
      const auto lead = static_cast<size_t>(rng.uniform(0.05, 0.6) * sr);
      const auto body = static_cast<size_t>(rng.uniform(1.8, 4.5) * sr);
      const auto tail = static_cast<size_t>(rng.uniform(0.05, 0.6) * sr);
      audio = tone_in_silence(spec.sample_rate, lead, body, tail, spk.freq,
                              rng.uniform(0.1, 0.7));
    }
    encode_wav(audio, root / u.audio_path);

    nlohmann::ordered_json j;
    j["id"] = u.id;
    j["speaker_id"] = u.speaker_id;
    j["language"] = u.language;
    j["audio_path"] = u.audio_path;
    j["transcript"] = u.transcript;
    lines.push_back(dump_line(j));

    // Hypothesis: the transcript on one line, sometimes missing its last word.
    std::string hyp;
    for (const auto& word : split_lines(text)) {
      if (!hyp.empty()) hyp += ' ';
      hyp += std::string(word);
    }
    if (rng.chance(0.5)) {
      if (const size_t cut = hyp.rfind(' '); cut != std::string::npos) hyp.erase(cut);
    }
    hyp_tsv += u.id + "\t" + hyp + "\n";
  }
  // Shuffle line order so loading must canonicalize.
  for (size_t i = lines.size(); i > 1; --i) std::swap(lines[i - 1], lines[rng.index(i)]);
  std::string manifest;
  for (const auto& l : lines) manifest += l + "\n";
  write_file(out.manifest, manifest);
  write_file(out.hypotheses, hyp_tsv);
  out.files = spec.files;
  return out;
}

}  // namespace corpusforge::testing
