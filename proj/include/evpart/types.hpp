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

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "evpart/error.hpp"

namespace evpart {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// All stochastic stages draw from this engine; seeded explicitly everywhere.
using Rng = std::mt19937_64;

enum class Domain { Target, Social };

inline std::string_view domain_name(Domain d) {
  return d == Domain::Target ? "target" : "social";
}

inline Domain parse_domain(std::string_view s) {
  if (s == "target" || s == "T") return Domain::Target;
  if (s == "social" || s == "S") return Domain::Social;
  throw Error(ErrorCode::ParseError, "unknown domain '" + std::string(s) + "'");
}

// Users are namespaced by domain so the two user sets can never collide.
inline std::string user_key(Domain d, std::string_view id) {
  return std::string(d == Domain::Target ? "T:" : "S:") + std::string(id);
}

// Derives an independent stage seed from the global seed and a stage name.
inline std::uint64_t derive_seed(std::uint64_t global, std::string_view stage) {
  std::uint64_t h = 14695981039346656037ULL;  // FNV-1a
  for (unsigned char c : stage) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = global + 0x9e3779b97f4a7c15ULL * (h | 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;  // splitmix64 finalizer
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace evpart
