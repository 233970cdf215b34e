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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "evpart/corpus.hpp"

namespace evpart {

struct DomainScale {
  int users = 0;
  int events = 0;
  double participants_mean = 0.0;  // Poisson mean, at least 2 per event
};

// Shared-topic generator for a target/social corpus pair. Words carry topics,
// events mix topics, and users join events with probability proportional to
// exp(beta * <preference, mixture>).
struct SynthConfig {
  int n_topics = 10;
  int vocab_size = 200;        // words per domain
  double vocab_overlap = 0.8;  // fraction of each vocabulary shared verbatim
  DomainScale target{448, 100, 17.92};
  DomainScale social{1042, 100, 59.6};
  int cold_events = 0;          // extra held-out target events
  int tokens_per_event = 8;
  double beta = 3.0;            // preference sharpness
  double user_concentration = 0.05;  // Dirichlet parameter of user preferences
  double event_concentration = 0.05;  // Dirichlet parameter of event mixtures
  int word_dim = 50;
  double word_noise = 0.3;      // per-word spread around its topic direction
  double base_noise = 0.1;      // sigma of base-embedding noise
  std::uint64_t seed = 0;

  void validate() const;
};

// Table-scale presets: "meetup-100", "meetup-200", "meetup-500".
SynthConfig synth_preset(const std::string& name);

struct SynthTruth {
  std::map<std::string, Vector> user_preferences;  // namespaced user key
  std::map<std::string, Vector> event_mixtures;    // namespaced event key
  std::map<std::string, int> word_topics;          // "target:w001" style keys
};

struct SynthData {
  Corpus target;
  Corpus social;
  std::vector<EventRecord> cold_events;
  SynthTruth truth;
  BaseEmbeddingTable base;
  WordVectorTable words;
};

SynthData generate(const SynthConfig& cfg);

// File names written by write_synth, relative to the output directory.
struct SynthFiles {
  static constexpr const char* kTargetEvents = "target_events.jsonl";
  static constexpr const char* kTargetUsers = "target_users.jsonl";
  static constexpr const char* kSocialEvents = "social_events.jsonl";
  static constexpr const char* kSocialUsers = "social_users.jsonl";
  static constexpr const char* kColdEvents = "cold_events.jsonl";
  static constexpr const char* kBaseEmbeddings = "base_embeddings.txt";
  static constexpr const char* kWordVectors = "word_vectors.txt";
};

void write_synth(const std::filesystem::path& dir, const SynthData& data);

}  // namespace evpart
