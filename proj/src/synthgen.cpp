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

#include "evpart/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace evpart {

void SynthConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::ConfigError, "synth: " + m); };
  if (n_topics < 1) fail("n_topics must be >= 1");
  if (vocab_size < n_topics) fail("vocab_size must be >= n_topics");
  if (!(vocab_overlap >= 0.0 && vocab_overlap <= 1.0)) fail("vocab_overlap must be in [0, 1]");
  for (const auto* s : {&target, &social}) {
    if (s->users < 2 || s->events < 1) fail("each domain needs >= 2 users and >= 1 event");
    if (!(s->participants_mean > 0.0)) fail("participants_mean must be > 0");
  }
  if (cold_events < 0) fail("cold_events must be >= 0");
  if (tokens_per_event < 1) fail("tokens_per_event must be >= 1");
  if (!(beta >= 0.0)) fail("beta must be >= 0");
  if (!(user_concentration > 0.0) || !(event_concentration > 0.0)) fail("concentrations must be > 0");
  if (word_dim < 1) fail("word_dim must be >= 1");
  if (!(word_noise >= 0.0) || !(base_noise >= 0.0)) fail("noise levels must be >= 0");
}

SynthConfig synth_preset(const std::string& name) {
  SynthConfig c;
  if (name == "meetup-100") {
    c.target = {448, 100, 1792.0 / 100.0};
    c.social = {1042, 100, 5960.0 / 100.0};
  } else if (name == "meetup-200") {
    c.target = {898, 200, 3592.0 / 200.0};
    c.social = {2255, 200, 12612.0 / 200.0};
  } else if (name == "meetup-500") {
    c.target = {2460, 500, 9840.0 / 500.0};
    c.social = {6599, 500, 36236.0 / 500.0};
  } else {
    throw Error(ErrorCode::ConfigError, "unknown synth preset '" + name + "'");
  }
  return c;
}

namespace {

std::string numbered(const char* prefix, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, i);
  return buf;
}

int width_for(int n) { return std::max(3, static_cast<int>(std::to_string(n).size())); }

Vector dirichlet(int k, double alpha, Rng& rng) {
  std::gamma_distribution<double> g(alpha, 1.0);
  Vector v(k);
  for (int i = 0; i < k; ++i) v[i] = g(rng);
  double s = v.sum();
  if (!(s > 0.0)) {
    // Every draw underflowed; fall back to a random vertex.
    v.setZero();
    v[std::uniform_int_distribution<int>(0, k - 1)(rng)] = 1.0;
    return v;
  }
  return v / s;
}

struct DomainWords {
  std::vector<std::vector<std::string>> by_topic;
};

// Weighted sampling without replacement (Efraimidis-Spirakis keys).
std::vector<int> weighted_sample(const std::vector<double>& log_weights, int count, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, int>> keys(log_weights.size());
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    // log(u^(1/w)) = log(u) / w, compared in log space via -log(-log u) + log w
    keys[i] = {log_weights[i] - std::log(-std::log(u)), static_cast<int>(i)};
  }
  std::partial_sort(keys.begin(), keys.begin() + count, keys.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(keys[i].second);
  return out;
}

struct DomainDraw {
  std::vector<UserRecord> users;
  std::vector<Vector> prefs;
};

DomainDraw draw_users(Domain d, int n, const SynthConfig& cfg, Rng& rng, SynthTruth& truth) {
  DomainDraw out;
  const int w = width_for(n);
  for (int i = 0; i < n; ++i) {
    UserRecord u{numbered(d == Domain::Target ? "tu" : "su", i, w), d};
    Vector p = dirichlet(cfg.n_topics, cfg.user_concentration, rng);
    truth.user_preferences[u.key()] = p;
    out.users.push_back(u);
    out.prefs.push_back(std::move(p));
  }
  return out;
}

std::vector<EventRecord> draw_events(Domain d, const char* prefix, int count, double mean,
                                     const DomainWords& words, const DomainDraw& users,
                                     const SynthConfig& cfg, Rng& rng, SynthTruth& truth) {
  std::vector<EventRecord> out;
  const int w = width_for(count);
  std::poisson_distribution<int> size_dist(mean);
  for (int i = 0; i < count; ++i) {
    Vector mix = dirichlet(cfg.n_topics, cfg.event_concentration, rng);
    std::discrete_distribution<int> topic(mix.data(), mix.data() + mix.size());
    std::string text;
    for (int t = 0; t < cfg.tokens_per_event; ++t) {
      const auto& pool = words.by_topic[topic(rng)];
      const auto& word = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      if (!text.empty()) text += ' ';
      text += word;
    }
    int n = std::clamp(size_dist(rng), 2, static_cast<int>(users.users.size()));
    std::vector<double> logw(users.users.size());
    for (std::size_t u = 0; u < logw.size(); ++u) logw[u] = cfg.beta * users.prefs[u].dot(mix);
    std::vector<std::string> participants;
    for (int u : weighted_sample(logw, n, rng)) participants.push_back(users.users[u].id);

    EventRecord e = make_event(numbered(prefix, i, w), d, text, std::move(participants));
    truth.event_mixtures[user_key(e.domain, e.id)] = std::move(mix);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

SynthData generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SynthData out;
  const int T = cfg.n_topics;
  const int shared = static_cast<int>(std::lround(cfg.vocab_overlap * cfg.vocab_size));
  const int own = cfg.vocab_size - shared;
  const int ww = width_for(cfg.vocab_size);

  // Topic directions and word vectors.
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.word_dim));
  std::vector<Vector> topic_dirs;
  for (int t = 0; t < T; ++t) {
    Vector v(cfg.word_dim);
    for (int i = 0; i < cfg.word_dim; ++i) v[i] = normal(rng) * scale;
    topic_dirs.push_back(std::move(v));
  }
  out.words.dim = cfg.word_dim;
  DomainWords target_words, social_words;
  target_words.by_topic.resize(T);
  social_words.by_topic.resize(T);
  auto add_word = [&](const std::string& w, int topic) {
    Vector v = topic_dirs[topic];
    for (int i = 0; i < cfg.word_dim; ++i) v[i] += cfg.word_noise * normal(rng) * scale;
    out.words.vectors[w] = std::move(v);
  };
  for (int i = 0; i < shared; ++i) {
    const std::string w = numbered("w", i, ww);
    add_word(w, i % T);
    target_words.by_topic[i % T].push_back(w);
    social_words.by_topic[i % T].push_back(w);
    out.truth.word_topics["target:" + w] = i % T;
    out.truth.word_topics["social:" + w] = i % T;
  }
  for (int i = 0; i < own; ++i) {
    const std::string tw = numbered("tw", i, ww);
    const std::string sw = numbered("sw", i, ww);
    add_word(tw, i % T);
    add_word(sw, i % T);
    target_words.by_topic[i % T].push_back(tw);
    social_words.by_topic[i % T].push_back(sw);
    out.truth.word_topics["target:" + tw] = i % T;
    out.truth.word_topics["social:" + sw] = i % T;
  }

  DomainDraw tu = draw_users(Domain::Target, cfg.target.users, cfg, rng, out.truth);
  DomainDraw su = draw_users(Domain::Social, cfg.social.users, cfg, rng, out.truth);

  out.base.dim = T;
  std::normal_distribution<double> noise(0.0, cfg.base_noise);
  for (std::size_t i = 0; i < tu.users.size(); ++i) {
    Vector b = tu.prefs[i];
    for (int k = 0; k < T; ++k) b[k] += noise(rng);
    out.base.vectors[tu.users[i].id] = std::move(b);
  }

  auto target_events = draw_events(Domain::Target, "te", cfg.target.events,
                                   cfg.target.participants_mean, target_words, tu, cfg, rng,
                                   out.truth);
  auto social_events = draw_events(Domain::Social, "st", cfg.social.events,
                                   cfg.social.participants_mean, social_words, su, cfg, rng,
                                   out.truth);
  out.cold_events = draw_events(Domain::Target, "tc", cfg.cold_events,
                                cfg.target.participants_mean, target_words, tu, cfg, rng,
                                out.truth);

  out.target = Corpus::build(Domain::Target, std::move(target_events), tu.users, out.base);
  out.social = Corpus::build(Domain::Social, std::move(social_events), su.users);
  return out;
}

void write_synth(const std::filesystem::path& dir, const SynthData& data) {
  std::filesystem::create_directories(dir);
  write_events(dir / SynthFiles::kTargetEvents, data.target.events());
  write_users(dir / SynthFiles::kTargetUsers, data.target.users());
  write_events(dir / SynthFiles::kSocialEvents, data.social.events());
  write_users(dir / SynthFiles::kSocialUsers, data.social.users());
  write_events(dir / SynthFiles::kColdEvents, data.cold_events);
  write_base_embeddings(dir / SynthFiles::kBaseEmbeddings, data.base);
  write_word_vectors(dir / SynthFiles::kWordVectors, data.words);
}

}  // namespace evpart
