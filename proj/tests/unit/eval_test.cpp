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

#include <cmath>

#include "corpusforge/eval.hpp"

namespace cf = corpusforge;

namespace {

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

TEST(Cosine, KnownValues) {
  const std::vector<double> a{1.0, 0.0};
  const std::vector<double> b{1.0, 1.0};
  EXPECT_NEAR(cf::cosine_similarity(a, b), 1.0 / std::sqrt(2.0), 1e-15);
  const std::vector<double> neg{-2.0, 0.0};
  EXPECT_NEAR(cf::cosine_similarity(a, neg), -1.0, 1e-15);
}

TEST(Cosine, ClampedToUnitRange) {
  const std::vector<double> a{0.1, 0.2, 0.3};
  const double c = cf::cosine_similarity(a, a);
  EXPECT_LE(c, 1.0);
  EXPECT_GE(c, 1.0 - 1e-15);
}

TEST(Embeddings, ParseValidates) {
  const auto v = cf::parse_embeddings(R"({"id":"x","dim":2,"vec":[1,2]})");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].values[1], 2.0);
  EXPECT_EQ(kind_of([] { cf::parse_embeddings(R"({"id":"x","dim":3,"vec":[1,2]})"); }),
            cf::ErrorKind::MalformedLine);
  EXPECT_EQ(kind_of([] { cf::parse_embeddings(R"({"id":"x","vec":[1,2]})"); }),
            cf::ErrorKind::MalformedLine);
}

TEST(SimilarityReport, MeanAndMaxAggregation) {
  const std::vector<cf::EmbeddingVector> truth = {{"t1", {1.0, 0.0}}, {"t2", {0.0, 1.0}}};
  const std::vector<cf::EmbeddingVector> synth = {{"s1", {1.0, 0.0}}};
  const std::map<std::string, std::string> ss{{"s1", "A"}};
  const std::map<std::string, std::string> ts{{"t1", "A"}, {"t2", "A"}};
  const auto mean = cf::speaker_similarity_report(synth, truth, ss, ts);
  EXPECT_NEAR(*mean.per_speaker.at("A").cosine.mean(), 0.5, 1e-12);
  const auto max = cf::speaker_similarity_report(synth, truth, ss, ts, cf::CosineAggregate::max);
  EXPECT_NEAR(*max.per_speaker.at("A").cosine.mean(), 1.0, 1e-12);
}

TEST(SimilarityReport, Errors) {
  const std::vector<cf::EmbeddingVector> truth = {{"t1", {1.0, 0.0}}};
  const std::vector<cf::EmbeddingVector> synth = {{"s1", {1.0, 0.0}}};
  EXPECT_EQ(kind_of([&] { cf::speaker_similarity_report(synth, truth, {}, {{"t1", "A"}}); }),
            cf::ErrorKind::UnknownId);
  EXPECT_EQ(kind_of([&] {
              cf::speaker_similarity_report(synth, truth, {{"s1", "B"}}, {{"t1", "A"}});
            }),
            cf::ErrorKind::MissingTruth);
}

TEST(CerReport, OverallIsItemWeighted) {
  const std::vector<cf::CerRecord> recs = {
      {"a", "", "", 0, 0.0}, {"b", "", "", 0, 0.3}, {"c", "", "", 0, 0.6}, {"z", "", "", 0, 9.0}};
  const auto r = cf::cer_report(recs, {{"a", "X"}, {"b", "X"}, {"c", "Y"}});
  EXPECT_NEAR(*r.per_speaker.at("X").cer.mean(), 0.15, 1e-12);
  EXPECT_NEAR(*r.overall.cer.mean(), 0.3, 1e-12);
  EXPECT_EQ(r.overall.cer.count, 3u);
}

TEST(Report, RenderingIncludesNotesAndProvenance) {
  cf::EvalReport r = cf::cer_report(std::vector<cf::CerRecord>{{"a", "", "", 0, 0.25}},
                                    {{"a", "X"}});
  const std::vector<cf::EmbeddingVector> v = {{"a", {1.0}}};
  r.merge(cf::speaker_similarity_report(v, v, {{"a", "X"}}, {{"a", "X"}},
                                        cf::CosineAggregate::mean, "model-x"));
  const auto table = cf::render_eval_table(r);
  EXPECT_NE(table.find("Cosine Sim"), std::string::npos);
  EXPECT_NE(table.find("0.2500"), std::string::npos);
  EXPECT_NE(table.find("model-x"), std::string::npos);
  const auto j = cf::to_json(r);
  EXPECT_EQ(j["provenance"], "model-x");
  EXPECT_EQ(j["notes"].size(), 2u);
  EXPECT_NEAR(j["per_speaker"]["X"]["mean_cosine"].get<double>(), 1.0, 1e-12);
}
