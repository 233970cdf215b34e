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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evpart/corpus.hpp"

namespace evpart {

enum class SplitMode { Warm, Cold };

struct SplitSpec {
  SplitMode mode = SplitMode::Warm;
  int candidate_pool_size = 100;  // n
  std::uint64_t seed = 0;
  int cold_event_count = 1000;

  void validate() const;
};

// One ranking query. Users are raw target-domain ids.
struct TestCase {
  std::string event_id;
  std::vector<std::string> positives;  // U+
  std::vector<std::string> excluded;   // never sampled as negatives (all known participants)
};

struct WarmSplit {
  Corpus train;
  std::vector<TestCase> cases;
  std::vector<std::string> ineligible;  // events with a single participant
};

// Moves one uniformly chosen participant of every event with >= 2
// participants into the test set.
WarmSplit make_warm_split(const Corpus& corpus, std::uint64_t seed);

// Every held-out event becomes a test case with its full participant set.
std::vector<TestCase> make_cold_split(const Corpus& train,
                                      const std::vector<EventRecord>& held_out);

// U+ plus n - |U+| distinct non-participants, sorted by id.
std::vector<std::string> build_candidates(const TestCase& tc, const std::vector<std::string>& pool,
                                          int n, std::uint64_t seed);

// Orders candidates by score (descending); equal scores fall back to id order.
std::vector<std::string> rank_candidates(const std::vector<std::string>& candidates,
                                         const std::vector<double>& scores);

double recall_at_k(const std::vector<std::string>& ranked,
                   const std::vector<std::string>& positives, int k);
double precision_at_k(const std::vector<std::string>& ranked,
                      const std::vector<std::string>& positives, int k);

struct EventResult {
  std::string event_id;
  std::vector<std::string> positives;
  std::vector<std::string> ranking;
  std::vector<double> scores;  // aligned with ranking
  double recall10 = 0.0;
  double precision5 = 0.0;
  std::optional<std::string> skipped;  // reason, when not evaluated
};

struct EvalReport {
  SplitSpec spec;
  std::string method;
  std::vector<EventResult> events;  // sorted by event id
  double mean_recall10 = 0.0;
  double mean_precision5 = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;

  std::string to_json() const;
  std::string summary_tsv() const;
};

// Scores for (event, candidate users) -- one score per candidate.
using ScoreFn = std::function<std::vector<double>(const std::string& event_id,
                                                  const std::vector<std::string>& users)>;

EvalReport evaluate(const ScoreFn& score, const std::vector<TestCase>& cases,
                    const std::vector<std::string>& user_pool, const SplitSpec& spec,
                    const std::string& method = "");

}  // namespace evpart
