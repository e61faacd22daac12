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

#include <stdexcept>
#include <string>
#include <string_view>

namespace corpusforge {

enum class ErrorKind {
  // corpus model
  MissingField,
  DuplicateId,
  MalformedLine,
  IoFailure,
  // audio
  UnsupportedFormat,
  CorruptHeader,
  EmptyAudio,
  FullySilent,
  AllZero,
  // cleaning
  ProbeFailure,
  // cer
  EmptyReference,
  DuplicateHypothesis,
  UnknownExtension,
  UnknownId,
  EndpointUnreachable,
  // alphabet
  DuplicateKey,
  MissingHeader,
  EmptyMapping,
  UnknownSymbol,
  UnknownLanguage,
  UnbalancedMarker,
  NestedMarker,
  // prompt
  NoEligibleSource,
  SourceTooShort,
  // metrics
  DimensionMismatch,
  ZeroNorm,
  MissingTruth,
  // sampler
  NonFiniteState,
  // configuration / cli
  ConfigInvalid,
  UnknownSubcommand,
  InvalidUtf8,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptHeader: return "CorruptHeader";
    case ErrorKind::EmptyAudio: return "EmptyAudio";
    case ErrorKind::FullySilent: return "FullySilent";
    case ErrorKind::AllZero: return "AllZero";
    case ErrorKind::ProbeFailure: return "ProbeFailure";
    case ErrorKind::EmptyReference: return "EmptyReference";
    case ErrorKind::DuplicateHypothesis: return "DuplicateHypothesis";
    case ErrorKind::UnknownExtension: return "UnknownExtension";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::EndpointUnreachable: return "EndpointUnreachable";
    case ErrorKind::DuplicateKey: return "DuplicateKey";
    case ErrorKind::MissingHeader: return "MissingHeader";
    case ErrorKind::EmptyMapping: return "EmptyMapping";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::UnknownLanguage: return "UnknownLanguage";
    case ErrorKind::UnbalancedMarker: return "UnbalancedMarker";
    case ErrorKind::NestedMarker: return "NestedMarker";
    case ErrorKind::NoEligibleSource: return "NoEligibleSource";
    case ErrorKind::SourceTooShort: return "SourceTooShort";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::MissingTruth: return "MissingTruth";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::UnknownSubcommand: return "UnknownSubcommand";
    case ErrorKind::InvalidUtf8: return "InvalidUtf8";
  }
  return "Unknown";
}

/// Every failure raised by the library. The kind is stable and meant to be
/// matched on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// I/O problems map to exit status 2 in the CLI, everything else to 1.
  bool is_io() const noexcept { return kind_ == ErrorKind::IoFailure; }

 private:
  ErrorKind kind_;
};

}  // namespace corpusforge
