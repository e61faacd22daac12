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

// Independent reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "corpusforge/alphabet.hpp"
#include "corpusforge/cer.hpp"

namespace corpusforge::oracle {

/// Textbook recursive Levenshtein definition, no memoization:
///   lev(a, b) = |a| if b empty, |b| if a empty,
///               lev(tail a, tail b) if heads match,
///               1 + min(lev(tail a, b), lev(a, tail b), lev(tail a, tail b)).
template <typename Char>
size_t recursive_edit_distance(const Char* a, size_t n, const Char* b, size_t m) {
  if (n == 0) return m;
  if (m == 0) return n;
  if (a[0] == b[0]) return recursive_edit_distance(a + 1, n - 1, b + 1, m - 1);
  return 1 + std::min({recursive_edit_distance(a + 1, n - 1, b, m),
                       recursive_edit_distance(a, n, b + 1, m - 1),
                       recursive_edit_distance(a + 1, n - 1, b + 1, m - 1)});
}

template <typename Str>
size_t recursive_edit_distance(const Str& a, const Str& b) {
  return recursive_edit_distance(a.data(), a.size(), b.data(), b.size());
}

/// Same recursion with a memo table keyed on the two suffix offsets. Used
/// where the unmemoized form is exponential (long inputs).
template <typename Str>
size_t memo_edit_distance(const Str& a, const Str& b) {
  const size_t n = a.size();
  const size_t m = b.size();
  std::vector<size_t> memo((n + 1) * (m + 1), static_cast<size_t>(-1));
  auto rec = [&](auto&& self, size_t i, size_t j) -> size_t {
    if (i == n) return m - j;
    if (j == m) return n - i;
    size_t& slot = memo[i * (m + 1) + j];
    if (slot != static_cast<size_t>(-1)) return slot;
    if (a[i] == b[j]) return slot = self(self, i + 1, j + 1);
    return slot = 1 + std::min({self(self, i + 1, j), self(self, i, j + 1),
                                self(self, i + 1, j + 1)});
  };
  return rec(rec, 0, 0);
}

/// Per speaker: sort by (cer, id), take the first n. Output ordered by
/// speaker, then rank.
inline std::vector<std::string> sort_then_take(const std::vector<ScoredItem>& items, size_t n) {
  std::map<std::string, std::vector<std::pair<double, std::string>>> groups;
  for (const auto& it : items) groups[it.speaker_id].emplace_back(it.cer, it.id);
  std::vector<std::string> out;
  for (auto& [spk, v] : groups) {
    std::sort(v.begin(), v.end());
    for (size_t i = 0; i < v.size() && i < n; ++i) out.push_back(v[i].second);
  }
  return out;
}

/// Position-by-position matcher: at each offset scan every table entry and
/// keep the longest key that matches there.
inline std::vector<std::string> brute_tokenize(const std::u32string& text,
                                               const std::vector<PhonemeEntry>& entries,
                                               UnknownPolicy policy) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    if (text::is_space(text[i])) {
      while (i < text.size() && text::is_space(text[i])) ++i;
      out.emplace_back(kWordBoundaryToken);
      continue;
    }
    const PhonemeEntry* best = nullptr;
    for (const auto& e : entries) {
      if (e.key.size() > text.size() - i) continue;
      if (text.compare(i, e.key.size(), e.key) != 0) continue;
      if (!best || e.key.size() > best->key.size()) best = &e;
    }
    if (best) {
      out.insert(out.end(), best->tokens.begin(), best->tokens.end());
      i += best->key.size();
    } else {
      if (policy == UnknownPolicy::unk) out.emplace_back(kUnknownToken);
      ++i;
    }
  }
  return out;
}

/// Naive length-by-length longest key match at position i.
inline size_t longest_key_at(const std::u32string& text, size_t i,
                             const std::vector<PhonemeEntry>& entries) {
  size_t best = 0;
  for (const auto& e : entries) {
    if (e.key.size() <= text.size() - i && text.compare(i, e.key.size(), e.key) == 0) {
      best = std::max(best, e.key.size());
    }
  }
  return best;
}

}  // namespace corpusforge::oracle
