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

#include <chrono>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "corpusforge/cer.hpp"
#include "corpusforge/corpus.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

struct AsrClientOptions {
  unsigned max_in_flight = 4;
  unsigned attempts = 3;
  /// Delay before the second attempt; doubles for each further attempt.
  std::chrono::milliseconds backoff{200};
  std::chrono::seconds timeout{30};
};

struct AsrFailure {
  std::string id;
  std::string reason;
};

/// Hypotheses in manifest id order plus the utterances that failed after all
/// retries. A non-empty `failures` list is the partial-failure report.
struct FetchResult {
  std::vector<HypothesisRecord> records;
  std::vector<AsrFailure> failures;

  bool partial() const { return !failures.empty(); }
};

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

inline Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw Error(ErrorKind::ConfigInvalid, "asr_endpoint: not an http:// URL: " + url);
  }
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

namespace detail {

/// One POST with retries. Returns the hypothesis or the last failure reason.
inline std::variant<std::string, std::string> post_with_retry(
    httplib::Client& client, const std::string& path, const std::string& body,
    const AsrClientOptions& opts) {
  std::string reason = "no attempts made";
  auto delay = opts.backoff;
  for (unsigned attempt = 0; attempt < opts.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto res = client.Post(path, body, "audio/wav");
    if (!res) {
      reason = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      reason = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return std::variant<std::string, std::string>(std::in_place_index<0>,
                                                    j.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      reason = std::string("bad response body: ") + e.what();
    }
  }
  return std::variant<std::string, std::string>(std::in_place_index<1>, reason);
}

}  // namespace detail

/// POSTs every utterance's WAV bytes to the ASR service and collects the
/// {"text": ...} responses. Audio paths resolve against audio_root.
inline FetchResult fetch_hypotheses(const std::string& endpoint_url, const Manifest& m,
                                    const std::filesystem::path& audio_root,
                                    const AsrClientOptions& opts = {}) {
  FetchResult result;
  if (m.empty()) return result;
  const Endpoint ep = parse_endpoint(endpoint_url);

  std::vector<std::optional<std::string>> texts(m.size());
  std::vector<std::string> reasons(m.size());
  parallel_for(m.size(), std::max(1u, opts.max_in_flight), [&](size_t i) {
    const auto& u = m.utterances[i];
    std::string body;
    try {
      body = read_file(audio_root / u.audio_path);
    } catch (const Error& e) {
      reasons[i] = e.what();
      return;
    }
    // Clients are cheap; one per request keeps workers independent.
    httplib::Client client(ep.origin);
    client.set_connection_timeout(opts.timeout);
    client.set_read_timeout(opts.timeout);
    auto outcome = detail::post_with_retry(client, ep.path, body, opts);
    if (outcome.index() == 0) {
      texts[i] = std::get<0>(std::move(outcome));
    } else {
      reasons[i] = std::get<1>(std::move(outcome));
    }
  });

  for (size_t i = 0; i < m.size(); ++i) {
    if (texts[i]) {
      result.records.push_back({m.utterances[i].id, std::move(*texts[i])});
    } else {
      result.failures.push_back({m.utterances[i].id, std::move(reasons[i])});
    }
  }
  if (result.records.empty()) {
    throw Error(ErrorKind::EndpointUnreachable,
                endpoint_url + ": no utterance succeeded (first failure: " +
                    result.failures.front().reason + ")");
  }
  return result;
}

}  // namespace corpusforge
