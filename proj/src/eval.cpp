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

#include "evpart/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "evpart/vector_io.hpp"

namespace evpart {

void SplitSpec::validate() const {
  if (candidate_pool_size < 2) throw Error(ErrorCode::ConfigError, "candidate pool size must be >= 2");
  if (cold_event_count < 0) throw Error(ErrorCode::ConfigError, "cold_event_count must be >= 0");
}

WarmSplit make_warm_split(const Corpus& corpus, std::uint64_t seed) {
  WarmSplit out;
  std::vector<EventRecord> train;
  train.reserve(corpus.events().size());
  for (const auto& e : corpus.events()) {
    EventRecord kept = e;
    if (e.participants.size() < 2) {
      out.ineligible.push_back(e.id);
      train.push_back(std::move(kept));
      continue;
    }
    // Per-event stream keeps each pick independent of event order.
    Rng rng(derive_seed(seed, e.id));
    std::uniform_int_distribution<std::size_t> pick(0, e.participants.size() - 1);
    const std::size_t i = pick(rng);
    out.cases.push_back({e.id, {e.participants[i]}, e.participants});
    kept.participants.erase(kept.participants.begin() + static_cast<std::ptrdiff_t>(i));
    train.push_back(std::move(kept));
  }
  out.train = corpus.with_events(std::move(train));
  std::sort(out.cases.begin(), out.cases.end(),
            [](const TestCase& a, const TestCase& b) { return a.event_id < b.event_id; });
  return out;
}

std::vector<TestCase> make_cold_split(const Corpus& train,
                                      const std::vector<EventRecord>& held_out) {
  std::vector<TestCase> out;
  std::set<std::string> seen;
  for (const auto& e : held_out) {
    if (train.find_event(e.id)) {
      throw Error(ErrorCode::OverlapError, "held-out event '" + e.id + "' is in the training data");
    }
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::OverlapError, "held-out event '" + e.id + "' appears twice");
    }
    out.push_back({e.id, e.participants, e.participants});
  }
  std::sort(out.begin(), out.end(),
            [](const TestCase& a, const TestCase& b) { return a.event_id < b.event_id; });
  return out;
}

std::vector<std::string> build_candidates(const TestCase& tc, const std::vector<std::string>& pool,
                                          int n, std::uint64_t seed) {
  if (tc.positives.empty()) throw Error(ErrorCode::EmptyPositives, "event " + tc.event_id);
  if (static_cast<int>(tc.positives.size()) >= n) {
    throw Error(ErrorCode::PositivesExceedN, "event " + tc.event_id + " has " +
                                                 std::to_string(tc.positives.size()) +
                                                 " positives for n = " + std::to_string(n));
  }
  std::set<std::string> blocked(tc.excluded.begin(), tc.excluded.end());
  blocked.insert(tc.positives.begin(), tc.positives.end());
  std::vector<std::string> outsiders;
  std::set<std::string> sorted_pool(pool.begin(), pool.end());
  for (const auto& u : sorted_pool) {
    if (!blocked.count(u)) outsiders.push_back(u);
  }
  const std::size_t need = static_cast<std::size_t>(n) - tc.positives.size();
  if (outsiders.size() < need) {
    throw Error(ErrorCode::PoolTooSmall, "event " + tc.event_id + " has " +
                                             std::to_string(outsiders.size()) +
                                             " non-participants, need " + std::to_string(need));
  }
  Rng rng(derive_seed(seed, tc.event_id));
  // Partial Fisher-Yates: the first `need` slots become a uniform sample.
  for (std::size_t i = 0; i < need; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, outsiders.size() - 1);
    std::swap(outsiders[i], outsiders[pick(rng)]);
  }
  std::vector<std::string> out(tc.positives.begin(), tc.positives.end());
  out.insert(out.end(), outsiders.begin(), outsiders.begin() + static_cast<std::ptrdiff_t>(need));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> rank_candidates(const std::vector<std::string>& candidates,
                                         const std::vector<double>& scores) {
  if (candidates.size() != scores.size()) {
    throw Error(ErrorCode::LengthMismatch, "rank_candidates: candidates vs scores");
  }
  std::vector<std::size_t> idx(candidates.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return candidates[a] < candidates[b];
  });
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(candidates[i]);
  return out;
}

namespace {

std::size_t hits_at_k(const std::vector<std::string>& ranked,
                      const std::vector<std::string>& positives, int k) {
  if (positives.empty()) throw Error(ErrorCode::EmptyPositives, "no positives");
  if (k < 1 || k > static_cast<int>(ranked.size())) {
    throw Error(ErrorCode::DomainError, "k = " + std::to_string(k) + " outside [1, " +
                                            std::to_string(ranked.size()) + "]");
  }
  std::set<std::string> pos(positives.begin(), positives.end());
  std::size_t hits = 0;
  for (int i = 0; i < k; ++i) hits += pos.count(ranked[i]);
  return hits;
}

}  // namespace

double recall_at_k(const std::vector<std::string>& ranked,
                   const std::vector<std::string>& positives, int k) {
  const std::size_t unique = std::set<std::string>(positives.begin(), positives.end()).size();
  return static_cast<double>(hits_at_k(ranked, positives, k)) / static_cast<double>(unique);
}

double precision_at_k(const std::vector<std::string>& ranked,
                      const std::vector<std::string>& positives, int k) {
  return static_cast<double>(hits_at_k(ranked, positives, k)) / static_cast<double>(k);
}

EvalReport evaluate(const ScoreFn& score, const std::vector<TestCase>& cases,
                    const std::vector<std::string>& user_pool, const SplitSpec& spec,
                    const std::string& method) {
  spec.validate();
  EvalReport r;
  r.spec = spec;
  r.method = method;
  const int n = spec.candidate_pool_size;
  for (const auto& tc : cases) {
    EventResult ev;
    ev.event_id = tc.event_id;
    ev.positives = tc.positives;
    std::vector<std::string> cand;
    try {
      cand = build_candidates(tc, user_pool, n, spec.seed);
    } catch (const Error& ex) {
      if (ex.code() != ErrorCode::PositivesExceedN && ex.code() != ErrorCode::PoolTooSmall &&
          ex.code() != ErrorCode::EmptyPositives) {
        throw;
      }
      ev.skipped = std::string(to_string(ex.code()));
      r.events.push_back(std::move(ev));
      continue;
    }
    std::vector<double> s = score(tc.event_id, cand);
    ev.ranking = rank_candidates(cand, s);
    std::map<std::string, double> by_user;
    for (std::size_t i = 0; i < cand.size(); ++i) by_user[cand[i]] = s[i];
    for (const auto& u : ev.ranking) ev.scores.push_back(by_user[u]);
    ev.recall10 = recall_at_k(ev.ranking, tc.positives, std::min(10, n));
    ev.precision5 = precision_at_k(ev.ranking, tc.positives, std::min(5, n));
    r.events.push_back(std::move(ev));
  }
  std::sort(r.events.begin(), r.events.end(),
            [](const EventResult& a, const EventResult& b) { return a.event_id < b.event_id; });
  double rs = 0.0, ps = 0.0;
  for (const auto& ev : r.events) {
    if (ev.skipped) {
      ++r.skipped;
      continue;
    }
    ++r.evaluated;
    rs += ev.recall10;
    ps += ev.precision5;
  }
  if (r.evaluated > 0) {
    r.mean_recall10 = rs / static_cast<double>(r.evaluated);
    r.mean_precision5 = ps / static_cast<double>(r.evaluated);
  }
  return r;
}

std::string EvalReport::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["config"] = {{"method", method},
                 {"mode", spec.mode == SplitMode::Warm ? "warm" : "cold"},
                 {"n", spec.candidate_pool_size},
                 {"seed", spec.seed},
                 {"recall_k", 10},
                 {"precision_k", 5}};
  ordered_json events = ordered_json::array();
  for (const auto& ev : this->events) {
    ordered_json e;
    e["event"] = ev.event_id;
    e["positives"] = ev.positives;
    if (ev.skipped) {
      e["skipped"] = *ev.skipped;
    } else {
      e["recall@10"] = ev.recall10;
      e["precision@5"] = ev.precision5;
      e["ranking"] = ev.ranking;
      e["scores"] = ev.scores;
    }
    events.push_back(std::move(e));
  }
  j["events"] = std::move(events);
  j["aggregate"] = {{"recall@10", mean_recall10},
                    {"precision@5", mean_precision5},
                    {"evaluated", evaluated},
                    {"skipped", skipped}};
  return j.dump(1) + "\n";
}

std::string EvalReport::summary_tsv() const {
  std::ostringstream s;
  s << (method.empty() ? "-" : method) << '\t' << (spec.mode == SplitMode::Warm ? "warm" : "cold")
    << '\t' << spec.candidate_pool_size << '\t' << evaluated << '\t' << skipped << '\t'
    << format_double(mean_recall10) << '\t' << format_double(mean_precision5) << '\n';
  return s.str();
}

}  // namespace evpart
