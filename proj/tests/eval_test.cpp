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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "evpart/eval.hpp"
#include "test_util.hpp"

namespace evpart {
namespace {

using Strings = std::vector<std::string>;

Strings users(int n, const std::string& prefix = "u") {
  Strings out;
  for (int i = 0; i < n; ++i) {
    std::string id = std::to_string(i);
    out.push_back(prefix + std::string(3 - id.size(), '0') + id);
  }
  return out;
}

Corpus corpus_of(const std::vector<std::pair<std::string, Strings>>& events, int n_users) {
  std::vector<EventRecord> ev;
  for (const auto& [id, parts] : events) ev.push_back(make_event(id, Domain::Target, "word " + id, parts));
  std::vector<UserRecord> us;
  for (const auto& u : users(n_users)) us.push_back({u, Domain::Target});
  return Corpus::build(Domain::Target, std::move(ev), std::move(us));
}

TEST(WarmSplit, TwoParticipantsForcedSplit) {
  Corpus c = corpus_of({{"e1", {"u000", "u001"}}}, 2);
  WarmSplit s = make_warm_split(c, 5);
  ASSERT_EQ(s.cases.size(), 1u);
  const std::string held = s.cases[0].positives.at(0);
  const std::string kept = held == "u000" ? "u001" : "u000";
  EXPECT_EQ(s.train.find_event("e1")->participants, Strings{kept});
  EXPECT_EQ(s.cases[0].excluded, (Strings{"u000", "u001"}));
}

TEST(WarmSplit, SingleParticipantEventIsFlagged) {
  Corpus c = corpus_of({{"e1", {"u000"}}, {"e2", {"u000", "u001", "u002"}}}, 3);
  WarmSplit s = make_warm_split(c, 1);
  EXPECT_EQ(s.ineligible, Strings{"e1"});
  EXPECT_EQ(s.train.find_event("e1")->participants, Strings{"u000"});
  ASSERT_EQ(s.cases.size(), 1u);
  EXPECT_EQ(s.cases[0].event_id, "e2");
  EXPECT_EQ(s.train.find_event("e2")->participants.size(), 2u);
}

TEST(WarmSplit, HoldsOutExactlyOnePerEligibleEvent) {
  std::vector<std::pair<std::string, Strings>> ev;
  Rng rng(2);
  const Strings all = users(30);
  for (int i = 0; i < 40; ++i) {
    Strings p = all;
    std::shuffle(p.begin(), p.end(), rng);
    p.resize(2 + rng() % 8);
    std::sort(p.begin(), p.end());
    ev.push_back({"e" + std::to_string(i), p});
  }
  Corpus c = corpus_of(ev, 30);
  WarmSplit s = make_warm_split(c, 3);
  ASSERT_EQ(s.cases.size(), 40u);
  for (const auto& tc : s.cases) {
    ASSERT_EQ(tc.positives.size(), 1u);
    const auto& before = c.find_event(tc.event_id)->participants;
    const auto& after = s.train.find_event(tc.event_id)->participants;
    EXPECT_EQ(after.size() + 1, before.size());
    EXPECT_TRUE(std::binary_search(before.begin(), before.end(), tc.positives[0]));
    EXPECT_FALSE(std::binary_search(after.begin(), after.end(), tc.positives[0]));
  }
}

TEST(WarmSplit, SameSeedSameSplit) {
  Corpus c = corpus_of({{"a", users(10)}, {"b", users(7)}, {"c", users(3)}}, 10);
  WarmSplit x = make_warm_split(c, 9), y = make_warm_split(c, 9);
  ASSERT_EQ(x.cases.size(), y.cases.size());
  for (std::size_t i = 0; i < x.cases.size(); ++i) EXPECT_EQ(x.cases[i].positives, y.cases[i].positives);
}

TEST(WarmSplit, PickIsRoughlyUniform) {
  Corpus c = corpus_of({{"e", users(4)}}, 4);
  std::map<std::string, int> counts;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) ++counts[make_warm_split(c, seed).cases[0].positives[0]];
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [u, n] : counts) EXPECT_NEAR(n, 1000, 120) << u;
}

TEST(ColdSplit, FullParticipantSets) {
  Corpus train = corpus_of({{"e1", {"u000", "u001"}}}, 10);
  std::vector<EventRecord> held{make_event("h2", Domain::Target, "x", users(7)),
                                make_event("h1", Domain::Target, "y", {"u000"})};
  auto cases = make_cold_split(train, held);
  ASSERT_EQ(cases.size(), 2u);
  EXPECT_EQ(cases[0].event_id, "h1");
  EXPECT_EQ(cases[1].positives.size(), 7u);
  EXPECT_EQ(cases[1].positives, users(7));
}

TEST(ColdSplit, OverlapRejected) {
  Corpus train = corpus_of({{"e1", {"u000", "u001"}}}, 3);
  try {
    make_cold_split(train, {make_event("e1", Domain::Target, "x", {"u002"})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OverlapError);
  }
}

TEST(ColdSplit, ThousandHeldOutEvents) {
  Corpus train = corpus_of({{"e", {"u000", "u001"}}}, 3);
  std::vector<EventRecord> held;
  for (int i = 0; i < 1000; ++i) held.push_back(make_event("h" + std::to_string(i), Domain::Target, "x", {"u002"}));
  EXPECT_EQ(make_cold_split(train, held).size(), 1000u);
}

TEST(Candidates, WarmCaseHasNinetyNineNegatives) {
  const Strings pool = users(300);
  TestCase tc{"e", {"u005"}, {"u005", "u006", "u007"}};
  Strings c = build_candidates(tc, pool, 100, 1);
  ASSERT_EQ(c.size(), 100u);
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  EXPECT_EQ(std::set<std::string>(c.begin(), c.end()).size(), 100u);
  EXPECT_TRUE(std::binary_search(c.begin(), c.end(), "u005"));
  EXPECT_FALSE(std::binary_search(c.begin(), c.end(), "u006"));
  EXPECT_FALSE(std::binary_search(c.begin(), c.end(), "u007"));
  EXPECT_EQ(c, build_candidates(tc, pool, 100, 1));
  EXPECT_NE(c, build_candidates(tc, pool, 100, 2));
}

TEST(Candidates, PositivesFillingPoolIsRejected) {
  TestCase tc{"e", users(100), users(100)};
  try {
    build_candidates(tc, users(300), 100, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PositivesExceedN);
  }
}

TEST(Candidates, PoolTooSmall) {
  TestCase tc{"e", {"u000"}, {"u000"}};
  try {
    build_candidates(tc, users(50), 100, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PoolTooSmall);
  }
}

Strings ranked_with(const std::string& positive, int position, int n) {
  Strings r;
  for (const auto& u : users(n, "n")) r.push_back(u);
  r.resize(n - 1);
  r.insert(r.begin() + position, positive);
  return r;
}

TEST(Metrics, Examples) {
  EXPECT_EQ(recall_at_k(ranked_with("p", 2, 100), {"p"}, 10), 1.0);
  EXPECT_EQ(recall_at_k(ranked_with("p", 10, 100), {"p"}, 10), 0.0);
  EXPECT_EQ(precision_at_k(ranked_with("p", 4, 100), {"p"}, 5), 0.2);
  EXPECT_EQ(precision_at_k(ranked_with("p", 5, 100), {"p"}, 5), 0.0);

  Strings r = users(20, "n");
  r[1] = "a";
  r[7] = "b";
  EXPECT_EQ(recall_at_k(r, {"a", "b", "c", "d"}, 10), 0.5);
  r[0] = "c";
  r[3] = "d";
  r[4] = "e";
  EXPECT_DOUBLE_EQ(precision_at_k(r, {"a", "c", "d"}, 5), 0.6);
}

TEST(Metrics, Errors) {
  EXPECT_THROW(recall_at_k(users(10), {}, 5), Error);
  EXPECT_THROW(precision_at_k(users(10), {"u000"}, 11), Error);
  EXPECT_THROW(precision_at_k(users(10), {"u000"}, 0), Error);
}

TEST(Metrics, BoundsAndFullRecall) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    Strings r = users(30);
    std::shuffle(r.begin(), r.end(), rng);
    Strings pos(r.begin(), r.begin() + 1 + rng() % 10);
    std::shuffle(r.begin(), r.end(), rng);
    const int k = 1 + static_cast<int>(rng() % 30);
    const double rc = recall_at_k(r, pos, k), pr = precision_at_k(r, pos, k);
    EXPECT_GE(rc, 0.0);
    EXPECT_LE(rc, 1.0);
    EXPECT_GE(pr, 0.0);
    EXPECT_LE(pr, 1.0);
    EXPECT_EQ(recall_at_k(r, pos, 30), 1.0);
  }
}

TEST(Metrics, SinglePositivePrecisionIsRecallOverK) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    Strings r = users(100);
    std::shuffle(r.begin(), r.end(), rng);
    const Strings pos{r[rng() % 100]};
    for (int k : {1, 5, 10, 50}) EXPECT_EQ(precision_at_k(r, pos, k), recall_at_k(r, pos, k) / k);
  }
}

TEST(Ranking, DescendingWithIdTieBreak) {
  const Strings c{"b", "a", "d", "c"};
  EXPECT_EQ(rank_candidates(c, {0.5, 0.5, 0.9, 0.1}), (Strings{"d", "a", "b", "c"}));
  EXPECT_EQ(rank_candidates(c, {1, 1, 1, 1}), (Strings{"a", "b", "c", "d"}));
  EXPECT_THROW(rank_candidates(c, {1, 2}), Error);
}

TEST(Ranking, StrictlyIncreasingTransformKeepsOrder) {
  Rng rng(6);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 100; ++t) {
    Strings c = users(50);
    std::vector<double> s(50), ts(50);
    for (int i = 0; i < 50; ++i) s[i] = std::round(u(rng) * 4) / 4;  // force some ties
    for (int i = 0; i < 50; ++i) ts[i] = std::exp(2.0 * s[i]) + 7.0;
    EXPECT_EQ(rank_candidates(c, s), rank_candidates(c, ts));
  }
}

struct EvalFixture {
  Strings pool = users(250);
  std::vector<TestCase> cases;
  SplitSpec spec;
  EvalFixture() {
    for (int i = 0; i < 20; ++i) {
      const std::string p = pool[(i * 37) % 250];
      cases.push_back({"e" + std::to_string(100 + i), {p}, {p}});
    }
    cases.push_back({"big", Strings(pool.begin(), pool.begin() + 100), {}});
    spec.seed = 8;
  }
  std::set<std::string> positives_of(const std::string& e) const {
    for (const auto& tc : cases)
      if (tc.event_id == e) return {tc.positives.begin(), tc.positives.end()};
    return {};
  }
};

TEST(Evaluate, OracleScoresPerfectRecall) {
  EvalFixture f;
  auto oracle = [&](const std::string& e, const Strings& us) {
    auto pos = f.positives_of(e);
    std::vector<double> s;
    for (const auto& u : us) s.push_back(pos.count(u) ? 1.0 : 0.0);
    return s;
  };
  EvalReport r = evaluate(oracle, f.cases, f.pool, f.spec);
  EXPECT_EQ(r.evaluated, 20u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_EQ(r.mean_recall10, 1.0);
  EXPECT_DOUBLE_EQ(r.mean_precision5, 0.2);
  for (const auto& ev : r.events) {
    if (ev.event_id == "big") {
      EXPECT_EQ(ev.skipped.value_or(""), "PositivesExceedN");
    } else {
      EXPECT_EQ(ev.ranking.size(), 100u);
    }
  }
}

TEST(Evaluate, AntiOracleScoresZero) {
  EvalFixture f;
  auto anti = [&](const std::string& e, const Strings& us) {
    auto pos = f.positives_of(e);
    std::vector<double> s;
    for (const auto& u : us) s.push_back(pos.count(u) ? 0.0 : 1.0);
    return s;
  };
  EvalReport r = evaluate(anti, f.cases, f.pool, f.spec);
  EXPECT_EQ(r.mean_recall10, 0.0);
  EXPECT_EQ(r.mean_precision5, 0.0);
}

TEST(Evaluate, ConstantModelMatchesIdOrderBruteForce) {
  EvalFixture f;
  auto constant = [](const std::string&, const Strings& us) { return std::vector<double>(us.size(), 0.3); };
  EvalReport r = evaluate(constant, f.cases, f.pool, f.spec);
  double expected = 0.0;
  int n = 0;
  for (const auto& tc : f.cases) {
    if (tc.positives.size() >= 100) continue;
    Strings c = build_candidates(tc, f.pool, 100, f.spec.seed);
    std::sort(c.begin(), c.end());
    int hit = 0;
    for (int i = 0; i < 10; ++i) hit += c[i] == tc.positives[0];
    expected += hit;
    ++n;
  }
  EXPECT_DOUBLE_EQ(r.mean_recall10, expected / n);
}

TEST(Evaluate, AggregateIsMeanOfEvaluatedEvents) {
  EvalFixture f;
  Rng rng(9);
  auto noisy = [&](const std::string&, const Strings& us) {
    std::vector<double> s;
    for (std::size_t i = 0; i < us.size(); ++i) s.push_back(std::uniform_real_distribution<double>()(rng));
    return s;
  };
  EvalReport r = evaluate(noisy, f.cases, f.pool, f.spec);
  double sum = 0.0;
  for (const auto& ev : r.events)
    if (!ev.skipped) sum += ev.recall10;
  EXPECT_DOUBLE_EQ(r.mean_recall10, sum / r.evaluated);
  EXPECT_TRUE(std::is_sorted(r.events.begin(), r.events.end(),
                             [](const EventResult& a, const EventResult& b) { return a.event_id < b.event_id; }));
}

TEST(Evaluate, ReportIsDeterministic) {
  EvalFixture f;
  auto hash_score = [](const std::string& e, const Strings& us) {
    std::vector<double> s;
    for (const auto& u : us) s.push_back(static_cast<double>(std::hash<std::string>{}(e + u) % 1000));
    return s;
  };
  EXPECT_EQ(evaluate(hash_score, f.cases, f.pool, f.spec, "m").to_json(),
            evaluate(hash_score, f.cases, f.pool, f.spec, "m").to_json());
}

}  // namespace
}  // namespace evpart
