// Copyright 2026 The evpart Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
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

namespace evpart {

enum class ErrorCode {
  // corpus
  ParseError,
  IntegrityError,
  NoKnownTokens,
  // math / shapes
  DomainError,
  DimensionMismatch,
  SingularSystem,
  LengthMismatch,
  // graph / embeddings
  EmptyCorpus,
  EmptyGraph,
  NoCandidates,
  MissingGraphEmbedding,
  InsufficientNeighbors,
  // training
  InsufficientUsers,
  UnresolvableEmbedding,
  EmptyDataset,
  // evaluation
  EmptyPositives,
  OverlapError,
  PoolTooSmall,
  PositivesExceedN,
  // plumbing
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::NoKnownTokens: return "NoKnownTokens";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::MissingGraphEmbedding: return "MissingGraphEmbedding";
    case ErrorCode::InsufficientNeighbors: return "InsufficientNeighbors";
    case ErrorCode::InsufficientUsers: return "InsufficientUsers";
    case ErrorCode::UnresolvableEmbedding: return "UnresolvableEmbedding";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyPositives: return "EmptyPositives";
    case ErrorCode::OverlapError: return "OverlapError";
    case ErrorCode::PoolTooSmall: return "PoolTooSmall";
    case ErrorCode::PositivesExceedN: return "PositivesExceedN";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace evpart
