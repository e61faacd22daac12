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
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "corpusforge/audio.hpp"
#include "corpusforge/corpus.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

inline constexpr double kDefaultMinDurationS = 3.0;

/// Drops clips shorter than min_s. A clip of exactly min_s is kept.
inline Manifest filter_min_duration(const Manifest& m, double min_s = kDefaultMinDurationS) {
  return filter_manifest(m, [&](const Utterance& u) { return u.duration_s >= min_s; });
}

/// Zero-shot prompt protocol: pick one clip of min_source_s..max_source_s
/// seconds (inclusive) per speaker and keep its first crop_s seconds.
struct PromptSpec {
  double min_source_s = 3.0;
  double max_source_s = 4.0;
  double crop_s = 3.0;
  uint64_t seed = 0;
};

inline void validate(const PromptSpec& s) {
  if (!(s.min_source_s <= s.max_source_s)) {
    throw Error(ErrorKind::ConfigInvalid, "prompt.min_source_s exceeds prompt.max_source_s");
  }
  if (!(s.crop_s > 0.0 && s.crop_s <= s.min_source_s)) {
    throw Error(ErrorKind::ConfigInvalid, "prompt.crop_s must be in (0, min_source_s]");
  }
}

inline Utterance select_prompt_source(const Manifest& m, const std::string& speaker,
                                      const PromptSpec& spec = {}) {
  validate(spec);
  std::vector<const Utterance*> eligible;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& u : m.utterances) {
    if (u.speaker_id != speaker) continue;
    lo = std::min(lo, u.duration_s);
    hi = std::max(hi, u.duration_s);
    if (u.duration_s >= spec.min_source_s && u.duration_s <= spec.max_source_s) {
      eligible.push_back(&u);
    }
  }
  if (eligible.empty()) {
    std::ostringstream os;
    os << "speaker '" << speaker << "' has no clip in [" << spec.min_source_s << ", "
       << spec.max_source_s << "] s";
    if (lo <= hi) {
      os << " (durations span " << lo << " to " << hi << " s)";
    } else {
      os << " (no clips at all)";
    }
    throw Error(ErrorKind::NoEligibleSource, os.str());
  }
  // Id order makes the pick independent of how the manifest was built.
  std::sort(eligible.begin(), eligible.end(),
            [](const Utterance* a, const Utterance* b) { return a->id < b->id; });
  const uint64_t h = seeded_hash(spec.seed, speaker);
  return *eligible[h % eligible.size()];
}

/// First round(crop_s * sample_rate) samples. Takes no transcript: the prompt
/// carries audio only.
inline AudioBuffer crop_prompt(const AudioBuffer& a, const PromptSpec& spec = {}) {
  const auto n = static_cast<size_t>(std::llround(spec.crop_s * a.sample_rate));
  if (a.samples.size() < n) {
    throw Error(ErrorKind::SourceTooShort,
                "source has " + std::to_string(a.samples.size()) + " samples, need " +
                    std::to_string(n));
  }
  return AudioBuffer{{a.samples.begin(), a.samples.begin() + static_cast<std::ptrdiff_t>(n)},
                     a.sample_rate};
}

inline nlohmann::ordered_json prompt_sidecar(const std::string& speaker,
                                             const std::string& source_id,
                                             const PromptSpec& spec) {
  nlohmann::ordered_json j;
  j["speaker_id"] = speaker;
  j["source_id"] = source_id;
  j["crop_s"] = spec.crop_s;
  j["seed"] = spec.seed;
  return j;
}

}  // namespace corpusforge
