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

#include "corpusforge/pipeline.hpp"
#include "support/synthetic_corpus.hpp"
#include "support/temp_dir.hpp"

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

cf::PipelineConfig small_config(const std::filesystem::path& root) {
  cf::PipelineConfig cfg;
  cfg.corpus_root = root;
  cfg.manifest = "raw_manifest.jsonl";
  cfg.hypotheses = "hypotheses.tsv";
  cfg.workers = 4;
  cfg.split.val_fraction = 0.2;
  return cfg;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  cf::PipelineConfig cfg;
  EXPECT_EQ(cfg.cer_top_n, 8000u);
  EXPECT_EQ(cfg.min_duration_s, 3.0);
  EXPECT_EQ(cfg.target_peak, 0.995);
  cf::apply_config_json(cfg, nlohmann::json::parse(R"({
    "seed": 5, "trim": {"pad_s": 0.1}, "split": {"seed": 9}, "log_level": "debug"})"));
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.prompt.seed, 5u);
  EXPECT_EQ(cfg.split.seed, 9u);
  EXPECT_EQ(cfg.trim.pad_s, 0.1);
  EXPECT_EQ(cfg.trim.threshold_db, 50.0);
  EXPECT_EQ(cfg.log_level, cf::LogLevel::debug);
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
  cf::PipelineConfig cfg;
  EXPECT_EQ(kind_of([&] { cf::apply_config_json(cfg, nlohmann::json::parse(R"({"sed": 1})")); }),
            cf::ErrorKind::ConfigInvalid);
  EXPECT_EQ(
      kind_of([&] { cf::apply_config_json(cfg, nlohmann::json::parse(R"({"workers": "x"})")); }),
      cf::ErrorKind::ConfigInvalid);
  cfg.workers = 0;
  EXPECT_EQ(kind_of([&] { cf::validate(cfg); }), cf::ErrorKind::ConfigInvalid);
}

TEST(Config, LoadFile) {
  cf::testing::TempDir dir;
  cf::write_file(dir / "c.json", R"({"cer_top_n": 10, "min_duration_s": 2.5})");
  const auto cfg = cf::load_config(dir / "c.json");
  EXPECT_EQ(cfg.cer_top_n, 10u);
  EXPECT_EQ(cfg.min_duration_s, 2.5);
  cf::write_file(dir / "bad.json", "{");
  EXPECT_EQ(kind_of([&] { cf::load_config(dir / "bad.json"); }), cf::ErrorKind::ConfigInvalid);
}

TEST(Scan, FillsDurationsAndCountsDefects) {
  cf::testing::TempDir dir;
  const auto corpus = cf::testing::generate_corpus(dir.path(), {60, 16000, 3});
  const auto raw = cf::load_manifest(corpus.manifest, {.require_audio_fields = false});
  cf::ScanReport rep;
  const auto [m, probes] = cf::scan_manifest(raw, dir.path(), 4, &rep);
  EXPECT_EQ(rep.files, 60u);
  EXPECT_EQ(rep.empty_files, 1u);  // n == 17
  EXPECT_EQ(rep.silent_files, 1u);  // n == 55
  for (const auto& u : m.utterances) EXPECT_EQ(u.sample_rate, 16000);
}

TEST(Pipeline, WritesEveryStageAndDryRunWritesNothing) {
  cf::testing::TempDir dir;
  cf::testing::generate_corpus(dir.path(), {40, 16000, 5});
  auto cfg = small_config(dir.path());
  cfg.out_dir = "dry";
  const auto dry = cf::run_pipeline(cfg, {.dry_run = true, .log = {}});
  EXPECT_FALSE(std::filesystem::exists(dir / "dry"));

  cfg.out_dir = "out";
  std::vector<std::string> messages;
  const auto r = cf::run_pipeline(
      cfg, {.dry_run = false,
            .log = [&](cf::LogLevel, const std::string& msg) { messages.push_back(msg); }});
  EXPECT_FALSE(messages.empty());
  EXPECT_EQ(r.train.utterances, dry.train.utterances);
  for (const char* name :
       {"00_scan.jsonl", "01_clean.jsonl", "02_trim.jsonl", "03_normalize.jsonl", "04_cer.jsonl",
        "05_select.jsonl", "06_filter.jsonl", "07_train.jsonl", "07_val.jsonl", "stats.txt",
        "stats.jsonl", "clean_report.json", "clean_report.txt", "pipeline_report.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / name)) << name;
  }
  const auto train = cf::load_manifest(dir / "out/07_train.jsonl");
  EXPECT_EQ(train.split, cf::Split::train);
  for (const auto& u : train.utterances) {
    EXPECT_GE(u.duration_s, 3.0);
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / u.audio_path)) << u.audio_path;
    const auto audio = cf::decode_wav(dir / "out" / u.audio_path);
    EXPECT_NEAR(cf::peak_amplitude(audio.samples), 0.995, 1.0 / 32768.0);
  }
  EXPECT_EQ(r.report["scan"]["files"], 40);
}

TEST(Pipeline, TopNLimitsEachSpeaker) {
  cf::testing::TempDir dir;
  cf::testing::generate_corpus(dir.path(), {48, 16000, 6});
  auto cfg = small_config(dir.path());
  cfg.cer_top_n = 3;
  cfg.min_duration_s = 0.0;
  const auto r = cf::run_pipeline(cfg, {.dry_run = true, .log = {}});
  std::map<std::string, size_t> per;
  for (const auto& u : r.train.utterances) ++per[u.speaker_id];
  for (const auto& u : r.val.utterances) ++per[u.speaker_id];
  for (const auto& [spk, n] : per) EXPECT_LE(n, 3u) << spk;
  EXPECT_EQ(r.report["select"]["top_n"], 3);
}

TEST(Pipeline, MissingManifestIsIo) {
  cf::testing::TempDir dir;
  auto cfg = small_config(dir.path());
  try {
    cf::run_pipeline(cfg);
    FAIL();
  } catch (const cf::Error& e) {
    EXPECT_TRUE(e.is_io());
  }
}
