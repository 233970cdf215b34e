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

#include <set>

#include "evpart/eval.hpp"
#include "evpart/joint_graph.hpp"
#include "evpart/synthgen.hpp"
#include "test_util.hpp"

namespace evpart {
namespace {

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig c;
  c.target = {60, 30, 6.0};
  c.social = {80, 30, 8.0};
  c.vocab_size = 40;
  c.n_topics = 5;
  c.word_dim = 8;
  c.seed = seed;
  return c;
}

TEST(Synth, PresetScales) {
  SynthConfig c = synth_preset("meetup-100");
  EXPECT_EQ(c.target.users, 448);
  EXPECT_EQ(c.target.events, 100);
  EXPECT_DOUBLE_EQ(c.target.participants_mean * c.target.events, 1792.0);
  EXPECT_EQ(synth_preset("meetup-200").target.events, 200);
  EXPECT_EQ(synth_preset("meetup-500").target.events, 500);
  EXPECT_THROW(synth_preset("meetup-7"), Error);
}

TEST(Synth, MeetupHundredCounts) {
  SynthConfig c = synth_preset("meetup-100");
  c.seed = 1;
  SynthData d = generate(c);
  EXPECT_EQ(d.target.events().size(), 100u);
  EXPECT_EQ(d.target.users().size(), 448u);
  EXPECT_EQ(d.social.events().size(), 100u);
  std::size_t edges = 0;
  for (const auto& e : d.target.events()) edges += e.participants.size();
  // Poisson total with mean 1792 (sd ~42), plus the floor of 2 per event.
  EXPECT_NEAR(static_cast<double>(edges), 1792.0, 200.0);
}

TEST(Synth, ZeroOverlapHasNoSameWordTriples) {
  SynthConfig c = small_config(2);
  c.vocab_overlap = 0.0;
  SynthData d = generate(c);
  for (const auto& [w, n] : d.target.vocab().counts) EXPECT_FALSE(d.social.vocab().contains(w)) << w;
  JointGraph g = build_joint_graph(d.target, d.social, kDefaultPhi);
  EXPECT_EQ(g.count(Relation::SameWord), 0u);
}

TEST(Synth, FullOverlapSharesVocabulary) {
  SynthConfig c = small_config(3);
  c.vocab_overlap = 1.0;
  SynthData d = generate(c);
  for (const auto& [w, n] : d.target.vocab().counts) EXPECT_EQ(w.substr(0, 1), "w");
  JointGraph g = build_joint_graph(d.target, d.social, kDefaultPhi);
  EXPECT_GT(g.count(Relation::SameWord), 0u);
}

TEST(Synth, SameSeedSameData) {
  SynthData a = generate(small_config(4)), b = generate(small_config(4));
  ASSERT_EQ(a.target.events().size(), b.target.events().size());
  for (std::size_t i = 0; i < a.target.events().size(); ++i) {
    EXPECT_EQ(a.target.events()[i].text, b.target.events()[i].text);
    EXPECT_EQ(a.target.events()[i].participants, b.target.events()[i].participants);
  }
  EXPECT_EQ(a.base.vectors, b.base.vectors);
  SynthData c = generate(small_config(5));
  EXPECT_NE(a.target.events()[0].text + a.target.events()[1].text,
            c.target.events()[0].text + c.target.events()[1].text);
}

TEST(Synth, TruthVectorsAreSimplices) {
  SynthData d = generate(small_config(6));
  for (const auto* m : {&d.truth.user_preferences, &d.truth.event_mixtures}) {
    for (const auto& [k, v] : *m) {
      EXPECT_GE(v.minCoeff(), 0.0) << k;
      EXPECT_NEAR(v.sum(), 1.0, 1e-12) << k;
    }
  }
  EXPECT_EQ(d.truth.user_preferences.size(), 140u);
  EXPECT_EQ(d.truth.event_mixtures.size(), 60u);
}

TEST(Synth, CorpusInvariantsHold) {
  SynthConfig c = small_config(7);
  c.cold_events = 10;
  SynthData d = generate(c);
  for (const Corpus* corpus : {&d.target, &d.social}) {
    for (const auto& e : corpus->events()) {
      EXPECT_GE(e.participants.size(), 2u);
      EXPECT_TRUE(std::is_sorted(e.participants.begin(), e.participants.end()));
      EXPECT_EQ(std::set<std::string>(e.participants.begin(), e.participants.end()).size(),
                e.participants.size());
      for (const auto& u : e.participants) EXPECT_TRUE(corpus->has_user(u));
      EXPECT_EQ(e.tokens.size(), static_cast<std::size_t>(c.tokens_per_event));
      for (const auto& w : e.tokens) EXPECT_NE(d.words.find(w), nullptr) << w;
    }
  }
  EXPECT_EQ(d.cold_events.size(), 10u);
  for (const auto& e : d.cold_events) EXPECT_EQ(d.target.find_event(e.id), nullptr);
  for (const auto& u : d.target.users()) {
    ASSERT_NE(d.base.find(u.id), nullptr);
    EXPECT_EQ(d.base.find(u.id)->size(), c.n_topics);
  }
}

TEST(Synth, BaseEmbeddingsArePreferencesPlusSmallNoise) {
  SynthConfig c = synth_preset("meetup-100");
  c.seed = 8;
  SynthData d = generate(c);
  double sq = 0.0;
  long n = 0;
  for (const auto& u : d.target.users()) {
    Vector diff = *d.base.find(u.id) - d.truth.user_preferences.at(u.key());
    sq += diff.squaredNorm();
    n += diff.size();
  }
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(n)), c.base_noise, 0.01);
}

TEST(Synth, InvalidConfigRejected) {
  SynthConfig c = small_config(9);
  c.vocab_overlap = 1.5;
  EXPECT_THROW(generate(c), Error);
  c = small_config(9);
  c.beta = -1;
  EXPECT_THROW(generate(c), Error);
  c = small_config(9);
  c.target.users = 0;
  EXPECT_THROW(generate(c), Error);
}

double oracle_recall(const SynthConfig& base, int seeds) {
  double total = 0.0;
  for (int s = 1; s <= seeds; ++s) {
    SynthConfig c = base;
    c.seed = static_cast<std::uint64_t>(s);
    SynthData d = generate(c);
    WarmSplit w = make_warm_split(d.target, derive_seed(c.seed, "split"));
    std::vector<std::string> pool;
    for (const auto& u : d.target.users()) pool.push_back(u.id);
    SplitSpec spec;
    spec.seed = c.seed;
    ScoreFn f = [&](const std::string& e, const std::vector<std::string>& us) {
      const Vector& m = d.truth.event_mixtures.at(user_key(Domain::Target, e));
      std::vector<double> out;
      for (const auto& u : us) out.push_back(d.truth.user_preferences.at(user_key(Domain::Target, u)).dot(m));
      return out;
    };
    total += evaluate(f, w.cases, pool, spec).mean_recall10;
  }
  return total / seeds;
}

TEST(Synth, PlantedSignalOracleRecall) {
  SynthConfig c = synth_preset("meetup-100");
  c.beta = 10.0;
  c.vocab_overlap = 1.0;
  EXPECT_GT(oracle_recall(c, 5), 0.9);
}

TEST(Synth, NoSignalOracleIsRandom) {
  SynthConfig c = synth_preset("meetup-100");
  c.beta = 0.0;
  const double r = oracle_recall(c, 20);
  EXPECT_GT(r, 0.07);
  EXPECT_LT(r, 0.13);
}

TEST(Synth, WrittenFilesLoadBack) {
  SynthData d = generate(small_config(10));
  const auto dir = testing::scratch_dir("synth_roundtrip");
  write_synth(dir, d);
  LoadedCorpus t = load_corpus(Domain::Target, dir / SynthFiles::kTargetEvents,
                               dir / SynthFiles::kTargetUsers, dir / SynthFiles::kBaseEmbeddings,
                               dir / SynthFiles::kWordVectors);
  ASSERT_EQ(t.corpus.events().size(), d.target.events().size());
  for (std::size_t i = 0; i < d.target.events().size(); ++i) {
    EXPECT_EQ(t.corpus.events()[i].tokens, d.target.events()[i].tokens);
    EXPECT_EQ(t.corpus.events()[i].participants, d.target.events()[i].participants);
  }
  for (const auto& [id, v] : d.base.vectors) EXPECT_EQ(*t.corpus.base().find(id), v);
  for (const auto& [w, v] : d.words.vectors) EXPECT_EQ(*t.words.find(w), v);
}

}  // namespace
}  // namespace evpart
