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

#include <atomic>
#include <thread>

#include "corpusforge/asr_client.hpp"
#include "support/synthetic_corpus.hpp"
#include "support/temp_dir.hpp"

namespace cf = corpusforge;

namespace {

/// Local stand-in ASR service. Replies with the byte size of the posted
/// audio. fail_first() makes the next request fail once; break_size(n) fails
/// every request with an n-byte body.
class FakeAsr {
 public:
  FakeAsr() {
    server_.Post("/asr", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (req.get_header_value("Content-Type") != "audio/wav") {
        res.status = 415;
        return;
      }
      if (broken_size_ == req.body.size()) {
        res.status = 500;
        return;
      }
      if (fail_first_.exchange(false)) {
        res.status = 503;
        return;
      }
      res.set_content(R"({"text":"bytes )" + std::to_string(req.body.size()) + "\"}",
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeAsr() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/asr"; }
  int requests() const { return requests_; }
  void fail_first() { fail_first_ = true; }
  void break_size(size_t n) { broken_size_ = n; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<bool> fail_first_{false};
  std::atomic<size_t> broken_size_{static_cast<size_t>(-1)};
};

cf::Manifest write_clips(const cf::testing::TempDir& dir, const std::vector<size_t>& lengths) {
  std::vector<cf::Utterance> utts;
  for (size_t i = 0; i < lengths.size(); ++i) {
    const std::string id = "u" + std::to_string(i);
    cf::encode_wav({std::vector<double>(lengths[i], 0.1), 16000}, dir / (id + ".wav"));
    utts.push_back({id, "s", "hi", id + ".wav", "t", 1.0, 16000});
  }
  return cf::make_manifest(utts);
}

cf::AsrClientOptions fast_options() {
  cf::AsrClientOptions o;
  o.backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(5);
  return o;
}

}  // namespace

TEST(Endpoint, Parse) {
  const auto ep = cf::parse_endpoint("http://localhost:8080/v1/asr");
  EXPECT_EQ(ep.origin, "http://localhost:8080");
  EXPECT_EQ(ep.path, "/v1/asr");
  EXPECT_EQ(cf::parse_endpoint("http://host").path, "/");
  EXPECT_THROW(cf::parse_endpoint("https://host/x"), cf::Error);
  EXPECT_THROW(cf::parse_endpoint("ftp://host/x"), cf::Error);
}

TEST(FetchHypotheses, ReturnsResultsInIdOrder) {
  FakeAsr asr;
  cf::testing::TempDir dir;
  const auto m = write_clips(dir, {100, 200, 300, 400, 500});
  const auto r = cf::fetch_hypotheses(asr.url(), m, dir.path(), fast_options());
  ASSERT_EQ(r.records.size(), 5u);
  EXPECT_FALSE(r.partial());
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.records[i].id, "u" + std::to_string(i));
    EXPECT_EQ(r.records[i].hypothesis, "bytes " + std::to_string(44 + 2 * (i + 1) * 100));
  }
}

TEST(FetchHypotheses, RetriesTransientFailure) {
  FakeAsr asr;
  asr.fail_first();
  cf::testing::TempDir dir;
  const auto m = write_clips(dir, {100});
  const auto r = cf::fetch_hypotheses(asr.url(), m, dir.path(), fast_options());
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(asr.requests(), 2);
}

TEST(FetchHypotheses, PartialFailureIsReported) {
  FakeAsr asr;
  asr.break_size(44 + 2 * 200);
  cf::testing::TempDir dir;
  const auto m = write_clips(dir, {100, 200, 300});
  const auto r = cf::fetch_hypotheses(asr.url(), m, dir.path(), fast_options());
  ASSERT_EQ(r.records.size(), 2u);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].id, "u1");
  EXPECT_NE(r.failures[0].reason.find("500"), std::string::npos);
}

TEST(FetchHypotheses, UnreachableEndpoint) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  cf::testing::TempDir dir;
  const auto m = write_clips(dir, {100, 100});
  auto opts = fast_options();
  opts.attempts = 2;
  try {
    cf::fetch_hypotheses("http://127.0.0.1:" + std::to_string(port) + "/asr", m, dir.path(),
                         opts);
    FAIL();
  } catch (const cf::Error& e) {
    EXPECT_EQ(e.kind(), cf::ErrorKind::EndpointUnreachable);
  }
}
