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

#include <gtest/gtest.h>

#include "corpusforge/prompt.hpp"

namespace cf = corpusforge;

namespace {

cf::Utterance utt(std::string id, std::string spk, double dur, int sr = 16000) {
  return {std::move(id), std::move(spk), "hi", id + ".wav", "t", dur, sr};
}

template <typename Fn>
cf::ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const cf::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return cf::ErrorKind::IoFailure;
}

}  // namespace

TEST(Filter, BoundaryIsInclusive) {
  const auto m = cf::make_manifest({utt("a", "s", 3.0), utt("b", "s", 2.999), utt("c", "s", 10.0)});
  const auto kept = cf::filter_min_duration(m);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept.utterances[0].id, "a");
  EXPECT_EQ(kept.utterances[1].id, "c");
  EXPECT_EQ(cf::filter_min_duration(m, 0.0).size(), 3u);
}

TEST(PromptSource, OnlyEligibleClipsAndStable) {
  const auto m = cf::make_manifest({utt("a", "s", 2.5), utt("b", "s", 3.5), utt("c", "s", 4.5),
                                    utt("d", "s", 3.0), utt("e", "t", 4.0)});
  cf::PromptSpec spec;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    spec.seed = seed;
    const auto src = cf::select_prompt_source(m, "s", spec);
    EXPECT_TRUE(src.id == "b" || src.id == "d") << src.id;
    EXPECT_EQ(cf::select_prompt_source(m, "s", spec).id, src.id);
  }
  EXPECT_EQ(cf::select_prompt_source(m, "t", spec).id, "e");
}

TEST(PromptSource, SeedsSpreadSelection) {
  std::vector<cf::Utterance> v;
  for (int i = 0; i < 10; ++i) v.push_back(utt("u" + std::to_string(i), "s", 3.5));
  const auto m = cf::make_manifest(v);
  std::set<std::string> picked;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    picked.insert(cf::select_prompt_source(m, "s", {3.0, 4.0, 3.0, seed}).id);
  }
  EXPECT_GT(picked.size(), 5u);
}

TEST(PromptSource, NoEligibleSourceReportsRange) {
  const auto m = cf::make_manifest({utt("a", "s", 2.0), utt("b", "s", 5.0)});
  try {
    cf::select_prompt_source(m, "s");
    FAIL();
  } catch (const cf::Error& e) {
    EXPECT_EQ(e.kind(), cf::ErrorKind::NoEligibleSource);
    EXPECT_NE(std::string(e.what()).find("2 to 5"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([&] { cf::select_prompt_source(m, "nobody"); }),
            cf::ErrorKind::NoEligibleSource);
}

TEST(Crop, ExactLength) {
  for (const int sr : {16000, 22050, 44100}) {
    const cf::AudioBuffer a{std::vector<double>(static_cast<size_t>(sr) * 4, 0.5), sr};
    EXPECT_EQ(cf::crop_prompt(a).size(), static_cast<size_t>(std::llround(3.0 * sr)));
  }
  const cf::AudioBuffer short_clip{std::vector<double>(100, 0.5), 16000};
  EXPECT_EQ(kind_of([&] { cf::crop_prompt(short_clip); }), cf::ErrorKind::SourceTooShort);
}

TEST(Crop, Sidecar) {
  const auto j = cf::prompt_sidecar("spk", "src", {3.0, 4.0, 3.0, 7});
  EXPECT_EQ(j["speaker_id"], "spk");
  EXPECT_EQ(j["source_id"], "src");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_FALSE(j.contains("transcript"));
}

TEST(PromptSpec, Validation) {
  EXPECT_THROW(cf::validate(cf::PromptSpec{4.0, 3.0, 3.0, 0}), cf::Error);
  EXPECT_THROW(cf::validate(cf::PromptSpec{3.0, 4.0, 3.5, 0}), cf::Error);
  EXPECT_NO_THROW(cf::validate(cf::PromptSpec{}));
}
