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
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "corpusforge/error.hpp"
#include "corpusforge/text.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

inline constexpr std::string_view kWordBoundaryToken = "|w";
inline constexpr std::string_view kUnknownToken = "<unk>";

struct PhonemeEntry {
  std::u32string key;
  std::vector<std::string> tokens;

  bool operator==(const PhonemeEntry&) const = default;
};

/// Grapheme-sequence to phoneme-token table for one language. Entries are
/// kept longest key first, then lexicographically.
class PhonemeTable {
 public:
  PhonemeTable() = default;

  PhonemeTable(std::string language, std::vector<PhonemeEntry> entries)
      : language_(std::move(language)), entries_(std::move(entries)) {
    for (const auto& e : entries_) {
      if (e.key.empty()) {
        throw Error(ErrorKind::EmptyMapping, "empty grapheme key");
      }
      if (e.tokens.empty()) {
        throw Error(ErrorKind::EmptyMapping,
                    "'" + text::encode_utf8(e.key) + "' maps to no tokens");
      }
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const PhonemeEntry& a, const PhonemeEntry& b) {
                if (a.key.size() != b.key.size()) return a.key.size() > b.key.size();
                return a.key < b.key;
              });
    for (size_t i = 0; i < entries_.size(); ++i) {
      if (!index_.emplace(entries_[i].key, i).second) {
        throw Error(ErrorKind::DuplicateKey,
                    "duplicate grapheme '" + text::encode_utf8(entries_[i].key) + "'");
      }
      max_key_len_ = std::max(max_key_len_, entries_[i].key.size());
    }
  }

  const std::string& language() const { return language_; }
  const std::vector<PhonemeEntry>& entries() const { return entries_; }
  size_t max_key_length() const { return max_key_len_; }

  const PhonemeEntry* find(std::u32string_view key) const {
    auto it = index_.find(std::u32string(key));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  /// Longest entry whose key is a prefix of `rest`, or null.
  const PhonemeEntry* longest_match(std::u32string_view rest) const {
    for (size_t len = std::min(max_key_len_, rest.size()); len > 0; --len) {
      if (const auto* e = find(rest.substr(0, len))) return e;
    }
    return nullptr;
  }

 private:
  std::string language_;
  std::vector<PhonemeEntry> entries_;
  std::unordered_map<std::u32string, size_t> index_;
  size_t max_key_len_ = 0;
};

/// Parses a table: a "#lang:<code>" header line, then one
/// "grapheme<TAB>space-separated tokens" line per entry.
inline PhonemeTable parse_table(std::string_view data) {
  const auto lines = split_lines(data);
  size_t i = 0;
  while (i < lines.size() && is_blank(lines[i])) ++i;
  constexpr std::string_view kHeader = "#lang:";
  if (i == lines.size() || !lines[i].starts_with(kHeader) ||
      lines[i].size() == kHeader.size()) {
    throw Error(ErrorKind::MissingHeader, "table must start with '#lang:<code>'");
  }
  std::string language(lines[i].substr(kHeader.size()));
  std::vector<PhonemeEntry> entries;
  std::unordered_set<std::u32string> seen;
  for (++i; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (is_blank(line)) continue;
    const std::string where = "line " + std::to_string(i + 1);
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorKind::MalformedLine, where + ": expected grapheme<TAB>tokens");
    }
    PhonemeEntry e;
    e.key = text::decode_utf8(text::nfc(line.substr(0, tab)));
    if (e.key.empty()) {
      throw Error(ErrorKind::EmptyMapping, where + ": empty grapheme");
    }
    std::string_view rest = line.substr(tab + 1);
    while (!rest.empty()) {
      const size_t sp = rest.find(' ');
      const std::string_view tok = rest.substr(0, sp);
      if (!tok.empty()) e.tokens.emplace_back(tok);
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    if (e.tokens.empty()) {
      throw Error(ErrorKind::EmptyMapping,
                  where + ": '" + text::encode_utf8(e.key) + "' maps to no tokens");
    }
    if (!seen.insert(e.key).second) {
      throw Error(ErrorKind::DuplicateKey,
                  where + ": duplicate grapheme '" + text::encode_utf8(e.key) + "'");
    }
    entries.push_back(std::move(e));
  }
  return PhonemeTable(std::move(language), std::move(entries));
}

inline PhonemeTable load_table(const std::filesystem::path& path) {
  return parse_table(read_file(path));
}

// ---------------------------------------------------------------------------
// Tokenization

enum class UnknownPolicy { error, skip, unk };

inline UnknownPolicy parse_unknown_policy(std::string_view s) {
  if (s == "error") return UnknownPolicy::error;
  if (s == "skip") return UnknownPolicy::skip;
  if (s == "unk") return UnknownPolicy::unk;
  throw Error(ErrorKind::ConfigInvalid, "unknown_policy must be error, skip or unk");
}

struct Token {
  std::string token;
  std::string language;

  bool operator==(const Token&) const = default;
};

using TokenSequence = std::vector<Token>;

namespace detail {

/// Tokenizes already-normalized scalars, appending to `out`. `offset` is the
/// position of `cps[0]` in the caller's text, for error messages.
inline void tokenize_into(std::u32string_view cps, const PhonemeTable& table,
                          UnknownPolicy policy, size_t offset, TokenSequence& out) {
  size_t i = 0;
  while (i < cps.size()) {
    if (text::is_space(cps[i])) {
      while (i < cps.size() && text::is_space(cps[i])) ++i;
      out.push_back({std::string(kWordBoundaryToken), table.language()});
      continue;
    }
    if (const auto* e = table.longest_match(cps.substr(i))) {
      for (const auto& t : e->tokens) out.push_back({t, table.language()});
      i += e->key.size();
      continue;
    }
    switch (policy) {
      case UnknownPolicy::error:
        throw Error(ErrorKind::UnknownSymbol,
                    text::codepoint_label(cps[i]) + " at offset " +
                        std::to_string(offset + i) + " has no entry in the '" +
                        table.language() + "' table");
      case UnknownPolicy::unk:
        out.push_back({std::string(kUnknownToken), table.language()});
        break;
      case UnknownPolicy::skip:
        break;
    }
    ++i;
  }
}

}  // namespace detail

/// Greedy longest-match tokenization. Whitespace runs become one word
/// boundary token.
inline TokenSequence tokenize(std::string_view input, const PhonemeTable& table,
                              UnknownPolicy policy = UnknownPolicy::error) {
  TokenSequence out;
  const std::u32string cps = text::decode_utf8(text::nfc(input));
  detail::tokenize_into(cps, table, policy, 0, out);
  return out;
}

using TableSet = std::map<std::string, PhonemeTable>;

/// Tokenizes text containing inline [lang:<code>]...[/lang] segments; text
/// outside any segment uses default_lang. Segments do not nest.
inline TokenSequence tokenize_code_switched(std::string_view input, const TableSet& tables,
                                            const std::string& default_lang,
                                            UnknownPolicy policy = UnknownPolicy::error) {
  auto table_for = [&](const std::string& code) -> const PhonemeTable& {
    auto it = tables.find(code);
    if (it == tables.end()) {
      throw Error(ErrorKind::UnknownLanguage, "no table loaded for '" + code + "'");
    }
    return it->second;
  };
  const PhonemeTable& base = table_for(default_lang);

  static constexpr std::u32string_view kOpen = U"[lang:";
  static constexpr std::u32string_view kClose = U"[/lang]";
  const std::u32string cps = text::decode_utf8(text::nfc(input));
  const std::u32string_view all(cps);

  TokenSequence out;
  const PhonemeTable* current = &base;
  bool inside = false;
  size_t seg_start = 0;
  size_t i = 0;
  auto flush = [&](size_t end) {
    detail::tokenize_into(all.substr(seg_start, end - seg_start), *current, policy,
                          seg_start, out);
  };
  while (i < all.size()) {
    const std::u32string_view rest = all.substr(i);
    if (rest.starts_with(kOpen)) {
      const size_t close = rest.find(U']');
      if (close == std::u32string_view::npos) {
        throw Error(ErrorKind::UnbalancedMarker,
                    "unterminated marker at offset " + std::to_string(i));
      }
      if (inside) {
        throw Error(ErrorKind::NestedMarker,
                    "language marker at offset " + std::to_string(i) +
                        " opened inside another segment");
      }
      flush(i);
      const std::string code =
          text::encode_utf8(rest.substr(kOpen.size(), close - kOpen.size()));
      current = &table_for(code);
      inside = true;
      i += close + 1;
      seg_start = i;
      continue;
    }
    if (rest.starts_with(kClose)) {
      if (!inside) {
        throw Error(ErrorKind::UnbalancedMarker,
                    "[/lang] at offset " + std::to_string(i) + " closes nothing");
      }
      flush(i);
      current = &base;
      inside = false;
      i += kClose.size();
      seg_start = i;
      continue;
    }
    ++i;
  }
  if (inside) {
    throw Error(ErrorKind::UnbalancedMarker, "language segment never closed");
  }
  flush(all.size());
  return out;
}

inline std::string join_tokens(const TokenSequence& seq) {
  std::string out;
  for (const auto& t : seq) {
    if (!out.empty()) out += ' ';
    out += t.token;
  }
  return out;
}

inline nlohmann::ordered_json to_json(const TokenSequence& seq) {
  nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
  nlohmann::ordered_json langs = nlohmann::ordered_json::array();
  for (const auto& t : seq) {
    tokens.push_back(t.token);
    langs.push_back(t.language);
  }
  nlohmann::ordered_json j;
  j["tokens"] = std::move(tokens);
  j["languages"] = std::move(langs);
  return j;
}

}  // namespace corpusforge
