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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset; the exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "evpart/embed_map.hpp"
#include "evpart/eval.hpp"
#include "evpart/joint_graph.hpp"
#include "evpart/pipeline.hpp"
#include "evpart/transe.hpp"
#include "test_util.hpp"

namespace evpart {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Strings = std::vector<std::string>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ------------------------------------------------------------ 1. metrics

Outcome metrics_oracle() {
  Timer timer;
  Rng rng(1);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    Strings cand;
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) {
      cand.push_back(std::string(1, static_cast<char>('a' + i)));
      scores.push_back(static_cast<double>(rng() % 3));  // few levels, many ties
    }
    std::shuffle(cand.begin(), cand.end(), rng);
    Strings pos;
    for (const auto& c : cand)
      if (rng() % 3 == 0) pos.push_back(c);
    if (pos.empty()) pos.push_back(cand[rng() % n]);

    // Exhaustive: the unique permutation whose scores are non-increasing and
    // whose equal-score runs are in id order.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end());
    Strings expected;
    int valid = 0;
    do {
      bool ok = true;
      for (int i = 0; i + 1 < n && ok; ++i) {
        const double a = scores[perm[i]], b = scores[perm[i + 1]];
        ok = a > b || (a == b && cand[perm[i]] < cand[perm[i + 1]]);
      }
      if (ok) {
        ++valid;
        expected.clear();
        for (int i : perm) expected.push_back(cand[i]);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    const Strings ranked = rank_candidates(cand, scores);
    if (valid != 1 || ranked != expected) ++mismatches;

    for (int k = 1; k <= n; ++k) {
      int hits = 0;
      for (int i = 0; i < k; ++i)
        for (const auto& p : pos) hits += expected[i] == p;
      const double r = static_cast<double>(hits) / static_cast<double>(pos.size());
      const double p = static_cast<double>(hits) / static_cast<double>(k);
      if (recall_at_k(ranked, pos, k) != r || precision_at_k(ranked, pos, k) != p) ++mismatches;
    }
  }
  const double t = timer.seconds();
  return {mismatches == 0 && t < 1.0,
          "200 rankings, " + std::to_string(mismatches) + " mismatches, " + fmt(t, 3) + " s"};
}

// ------------------------------------------------------------ 2. MI

Outcome mi_oracle() {
  Timer timer;
  Rng rng(2);
  double worst = 0.0;
  int pairs = 0, edge_mismatch = 0;
  const Strings vocab{"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"};
  for (int corpus_i = 0; corpus_i < 20; ++corpus_i) {
    std::vector<EventRecord> events;
    std::vector<std::set<std::string>> present;
    for (int e = 0; e < 20; ++e) {
      std::string text;
      std::set<std::string> words;
      const int len = 1 + static_cast<int>(rng() % 5);
      for (int i = 0; i < len; ++i) {
        const auto& w = vocab[rng() % vocab.size()];
        text += w + " ";
        words.insert(w);
      }
      events.push_back(make_event("e" + std::to_string(e), Domain::Target, text, {"u"}));
      present.push_back(words);
    }
    Corpus c = Corpus::build(Domain::Target, events, {{"u", Domain::Target}});
    const double phi = kDefaultPhi;
    JointGraph g = build_single_domain_graph(c, phi);
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& t : g.triples()) {
      if (t.relation == Relation::CoOccurrence) edges.insert({g.entities()[t.head].key, g.entities()[t.tail].key});
    }
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      for (std::size_t j = i + 1; j < vocab.size(); ++j) {
        const auto &w1 = vocab[i], &w2 = vocab[j];
        long n1 = 0, n2 = 0, both = 0;
        for (const auto& s : present) {
          n1 += s.count(w1);
          n2 += s.count(w2);
          both += s.count(w1) && s.count(w2);
        }
        if (n1 == 0 || n2 == 0) continue;
        ++pairs;
        const double brute = both == 0 ? kNegInf : std::log(static_cast<double>(both) * 20.0 /
                                                            (static_cast<double>(n1) * n2));
        const double lib = mutual_information(both, c.vocab().count(w1), c.vocab().count(w2), 20);
        if (std::isinf(brute) || std::isinf(lib)) {
          if (brute != lib) worst = INFINITY;
        } else {
          worst = std::max(worst, std::abs(brute - lib));
        }
        const auto key = w1 < w2 ? std::pair{w1, w2} : std::pair{w2, w1};
        if ((brute > phi) != (edges.count(key) == 1)) ++edge_mismatch;
      }
    }
  }
  const double t = timer.seconds();
  return {worst < 1e-12 && edge_mismatch == 0 && t < 1.0,
          std::to_string(pairs) + " word pairs, max abs err " + fmt(worst, 17) + ", " +
              std::to_string(edge_mismatch) + " edge mismatches, " + fmt(t, 3) + " s"};
}

// ------------------------------------------------------------ 3. gradients

std::vector<double> labels_of(int n, Rng& rng) {
  std::vector<double> y(n);
  for (auto& v : y) v = std::bernoulli_distribution(0.4)(rng) ? 1.0 : 0.0;
  return y;
}

std::vector<double> probs_of(int n, Rng& rng) {
  std::vector<double> p(n);
  for (auto& v : p) v = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  return p;
}

Outcome gradient_checks() {
  Timer timer;
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  bool saw_attn = false;
  auto note = [&](const testing::GradCheck& g, const std::string& label) {
    checked += g.checked;
    if (g.max_rel > worst) {
      worst = g.max_rel;
      where = label + " " + g.worst;
    }
  };
  for (int point = 0; point < 5; ++point) {
    Rng rng(300 + point);
    NeumfModel n = NeumfModel::init(testing::small_shape(3, 4), InputSpace::Base, rng);
    testing::randomize(n.params, rng);
    BatchInputs nin = testing::random_batch(0, 3, 4, 6, rng);
    note(testing::check_gradients(n, nin, labels_of(6, rng), {}, 0.0), "neumf partp");
    note(testing::check_gradients(n, nin, labels_of(6, rng), probs_of(6, rng), 0.8), "neumf kd");

    BgfModel b = BgfModel::init({testing::small_shape(5, 3), testing::small_shape(2, 3), true}, rng);
    testing::randomize(b.params, rng);
    for (const auto& [name, m] : b.params.tensors()) saw_attn |= name == "attn_W";
    BatchInputs bin = testing::random_batch(5, 2, 3, 5, rng);
    note(testing::check_gradients(b, bin, labels_of(5, rng), {}, 0.0), "bgf partp");
    note(testing::check_gradients(b, bin, labels_of(5, rng), probs_of(5, rng), 1.2), "bgf kd");

    // Loss terms against the logit directly.
    const double h = 1e-5;
    const double z = std::uniform_real_distribution<double>(-4, 4)(rng);
    const double y = point % 2, q = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const double np = (partp_point(sigmoid(z + h), y) - partp_point(sigmoid(z - h), y)) / (2 * h);
    const double nk = (kd_point(sigmoid(z + h), q) - kd_point(sigmoid(z - h), q)) / (2 * h);
    worst = std::max({worst, testing::rel_error(partp_dlogit(sigmoid(z), y), np),
                      testing::rel_error(kd_dlogit(sigmoid(z), q), nk)});
    checked += 2;
  }
  const double t = timer.seconds();
  return {worst < 1e-4 && saw_attn && t < 30.0,
          std::to_string(checked) + " partials at 5 points per model, max rel err " +
              fmt(worst, 8) + (worst >= 1e-4 ? " at " + where : "") + ", " + fmt(t, 2) + " s"};
}

// ------------------------------------------------------------ 4. mapping

Outcome mapping_recovery() {
  Timer timer;
  Rng rng(4);
  const Matrix truth = testing::random_matrix(20, 30, rng);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<EmbeddingPair> clean, noisy;
  for (int i = 0; i < 200; ++i) {
    Vector x = testing::random_vector(30, rng);
    Vector y = truth * x;
    clean.push_back({x, y});
    for (auto& v : y) v += noise(rng);
    noisy.push_back({x, y});
  }
  const double exact = (fit_transfer_matrix(clean, 0.0).values - truth).norm();
  const double rel = (fit_transfer_matrix(noisy, 0.1).values - truth).norm() / truth.norm();
  const double t = timer.seconds();
  return {exact < 1e-6 && rel < 0.05 && t < 5.0,
          "noiseless Frobenius err " + fmt(exact, 12) + ", noisy relative err " + fmt(rel, 5) + ", " +
              fmt(t, 3) + " s"};
}

// ------------------------------------------------------------ 5. TransE

// Three communities of 4 users and 6 words (30 entities); every user attends
// every word of its community.
struct TranseFixture {
  std::vector<Entity> ents;
  std::vector<Triple> triples;
};

TranseFixture communities() {
  TranseFixture f;
  for (int c = 0; c < 3; ++c) {
    for (int u = 0; u < 4; ++u) f.ents.push_back({EntityKind::User, Domain::Target, "u" + std::to_string(c) + std::to_string(u)});
    for (int w = 0; w < 6; ++w) f.ents.push_back({EntityKind::Word, Domain::Target, "w" + std::to_string(c) + std::to_string(w)});
  }
  std::sort(f.ents.begin(), f.ents.end());
  auto idx = [&](EntityKind k, const std::string& key) {
    const Entity e{k, Domain::Target, key};
    return static_cast<int>(std::lower_bound(f.ents.begin(), f.ents.end(), e) - f.ents.begin());
  };
  for (int c = 0; c < 3; ++c) {
    const std::string cs = std::to_string(c);
    for (int u = 0; u < 4; ++u)
      for (int w = 0; w < 6; ++w)
        f.triples.push_back({idx(EntityKind::User, "u" + cs + std::to_string(u)), Relation::Participation,
                             idx(EntityKind::Word, "w" + cs + std::to_string(w))});
  }
  std::sort(f.triples.begin(), f.triples.end());
  return f;
}

TranseResult fit(const TranseFixture& f, const std::vector<Triple>& triples, std::uint64_t seed) {
  TranseConfig cfg;
  cfg.dim = 16;
  cfg.epochs = 200;
  cfg.learning_rate = 0.05;
  cfg.seed = seed;
  return train_transe(JointGraph(f.ents, triples, kDefaultPhi), cfg);
}

Outcome transe_sanity() {
  Timer timer;
  const TranseFixture f = communities();

  // Loss behaviour on the whole fixture.
  const TranseResult whole = fit(f, f.triples, 5);
  const auto& trace = whole.loss_trace;
  int non_increasing = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) non_increasing += trace[i] <= trace[i - 1];
  const double frac_loss = static_cast<double>(non_increasing) / static_cast<double>(trace.size() - 1);

  // Generalization: refit without a fifth of the edges, then rank them.
  Rng rng(5);
  std::vector<Triple> train, held;
  for (const auto& t : f.triples) (rng() % 5 == 0 ? held : train).push_back(t);
  const TranseResult r = fit(f, train, 6);
  std::set<Triple> truth(f.triples.begin(), f.triples.end());
  const Vector rel = r.table.relation(Relation::Participation);
  auto score = [&](int h, int t) { return transe_score(r.table.entity(f.ents[h]), rel, r.table.entity(f.ents[t])); };
  long wins = 0, total = 0;
  for (const auto& t : held) {
    const double s = score(t.head, t.tail);
    for (int e = 0; e < static_cast<int>(f.ents.size()); ++e) {
      // same slot, same entity kind, not itself a true triple
      if (f.ents[e].kind == EntityKind::User && e != t.head && !truth.count({e, t.relation, t.tail})) {
        ++total;
        wins += s < score(e, t.tail);
      }
      if (f.ents[e].kind == EntityKind::Word && e != t.tail && !truth.count({t.head, t.relation, e})) {
        ++total;
        wins += s < score(t.head, e);
      }
    }
  }
  const double frac_rank = static_cast<double>(wins) / static_cast<double>(total);
  const double t = timer.seconds();
  return {frac_loss >= 0.9 && frac_rank >= 0.8 && t < 30.0,
          "loss non-increasing on " + fmt(100 * frac_loss, 1) + "% of epochs (final " + fmt(trace.back(), 4) +
              "), " + std::to_string(held.size()) + " held-out triples beat " + fmt(100 * frac_rank, 1) +
              "% of corruptions, " + fmt(t, 2) + " s"};
}

// ------------------------------------------------------------ 6. KL

Outcome kl_properties() {
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double max_self = 0.0, min_pair = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng() % 16);
    std::vector<double> p(n), q(n);
    for (int j = 0; j < n; ++j) {
      // include exact 0 and 1 so clamping is exercised
      const int mode = static_cast<int>(rng() % 10);
      p[j] = mode == 0 ? 0.0 : mode == 1 ? 1.0 : u(rng);
      q[j] = u(rng);
    }
    max_self = std::max(max_self, kd_loss(p, p));
    min_pair = std::min(min_pair, kd_loss(p, q));
  }
  const double direct = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
  std::vector<double> a{0.5}, b{0.25};
  const double lib = kd_loss(a, b);
  const bool pass = max_self <= 1e-12 && min_pair >= 0.0 && std::abs(lib - 0.143841) < 1e-6 &&
                    std::abs(direct - 0.143841) < 1e-6;
  return {pass, "max KL(p,p) " + fmt(max_self, 15) + ", min KL(p,q) " + fmt(min_pair, 6) +
                    ", KL(0.5||0.25) " + fmt(lib, 7) + " (formula " + fmt(direct, 7) + ")"};
}

// ------------------------------------------------------------ pipeline runs

// Reduced model sizes keep five seeds of three or four methods under ten
// minutes on one core.
json run_config(const std::string& method, std::uint64_t seed, double beta, const fs::path& root) {
  std::ostringstream data;
  data << "data_beta" << beta << "_seed" << seed;
  return json{{"method", method},
              {"seed", seed},
              {"out_dir", (root / (method + "_beta" + fmt(beta, 1) + "_seed" + std::to_string(seed))).string()},
              {"data_dir", (root / data.str()).string()},
              {"synth", {{"preset", "meetup-100"}, {"beta", beta}, {"vocab_overlap", 0.8}}},
              {"transe", {{"dim", 32}, {"epochs", 100}}},
              {"model", {{"latent", 32}, {"mlp_widths", {64, 32, 16}}}},
              {"train", {{"epochs", 20}, {"learning_rate", 0.002}, {"batch_size", 32}}},
              {"split", {{"mode", "warm"}, {"n", 100}}}};
}

double run_recall(const json& j) {
  PipelineConfig c = parse_pipeline_config(j.dump());
  run_stage("pipeline", c);
  return json::parse(slurp(c.out_dir / Artifacts::kReport))["aggregate"]["recall@10"].get<double>();
}

fs::path scratch_root() {
  const fs::path root = fs::temp_directory_path() / "evpart_acceptance";
  return root;
}

// ------------------------------------------------------------ 7. determinism

Outcome determinism() {
  Timer timer;
  const fs::path a = scratch_root() / "det_a", b = scratch_root() / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  PipelineConfig ca = parse_pipeline_config(run_config("proposed", 7, 3.0, a).dump());
  PipelineConfig cb = parse_pipeline_config(run_config("proposed", 7, 3.0, b).dump());
  run_stage("pipeline", ca);
  run_stage("pipeline", cb);
  const std::string ra = slurp(ca.out_dir / Artifacts::kReport), rb = slurp(cb.out_dir / Artifacts::kReport);
  return {!ra.empty() && ra == rb, "two proposed runs on meetup-100, report.json " +
                                       std::to_string(ra.size()) + " bytes, " +
                                       (ra == rb ? "identical" : "DIFFERENT") + ", " + fmt(timer.seconds(), 1) + " s"};
}

// ------------------------------------------------------------ 8. direction

std::map<std::string, std::vector<double>> sweep(const Strings& methods, double beta) {
  const fs::path root = scratch_root() / ("sweep_beta" + fmt(beta, 1));
  fs::remove_all(root);
  std::map<std::string, std::vector<double>> out;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    for (const auto& m : methods) out[m].push_back(run_recall(run_config(m, seed, beta, root)));
  return out;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

std::string describe(const std::map<std::string, std::vector<double>>& r) {
  std::string s;
  for (const auto& [m, v] : r) {
    s += (s.empty() ? "" : "; ") + m + " " + fmt(mean(v), 3) + " [";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i], 2);
    s += "]";
  }
  return s;
}

Outcome transfer_direction() {
  Timer timer;
  auto r = sweep({"base", "mix", "proposed"}, 3.0);
  const double t = timer.seconds();
  const bool pass = mean(r["proposed"]) >= mean(r["base"]) && mean(r["proposed"]) >= mean(r["mix"]) && t < 600.0;
  return {pass, "mean warm Recall@10 over 5 seeds: " + describe(r) + ", " + fmt(t, 0) + " s"};
}

// ------------------------------------------------------------ 9. calibration

Outcome random_calibration() {
  Timer timer;
  auto r = sweep({"base", "bgf", "mix", "proposed"}, 0.0);
  bool pass = true;
  for (const auto& [m, v] : r) pass &= mean(v) >= 0.07 && mean(v) <= 0.13;
  return {pass, "beta 0, mean warm Recall@10 over 5 seeds: " + describe(r) + ", " + fmt(timer.seconds(), 0) + " s"};
}

// ------------------------------------------------------------ 10. protocol

Outcome protocol_fidelity() {
  Rng rng(10);
  Strings users;
  for (int i = 0; i < 150; ++i) users.push_back("u" + std::to_string(1000 + i));
  std::vector<UserRecord> records;
  for (const auto& u : users) records.push_back({u, Domain::Target});
  auto participants = [&](int n) {
    Strings p = users;
    std::shuffle(p.begin(), p.end(), rng);
    p.resize(n);
    return p;
  };
  std::vector<EventRecord> events;
  for (int i = 0; i < 30; ++i) events.push_back(make_event("e" + std::to_string(i), Domain::Target, "w", participants(1 + i % 8)));
  const Corpus corpus = Corpus::build(Domain::Target, events, records);

  std::vector<std::string> problems;
  WarmSplit warm = make_warm_split(corpus, 3);
  std::set<std::string> in_cases;
  for (const auto& tc : warm.cases) {
    in_cases.insert(tc.event_id);
    const auto& before = corpus.find_event(tc.event_id)->participants;
    const auto& after = warm.train.find_event(tc.event_id)->participants;
    if (tc.positives.size() != 1) problems.push_back("warm |U+| != 1 for " + tc.event_id);
    else if (after.size() + 1 != before.size() ||
             std::find(after.begin(), after.end(), tc.positives[0]) != after.end() ||
             std::find(before.begin(), before.end(), tc.positives[0]) == before.end())
      problems.push_back("warm hold-out wrong for " + tc.event_id);
  }
  std::size_t eligible = 0;
  for (const auto& e : corpus.events()) {
    if (e.participants.size() >= 2) {
      ++eligible;
      if (!in_cases.count(e.id)) problems.push_back("eligible event without case " + e.id);
    } else if (std::find(warm.ineligible.begin(), warm.ineligible.end(), e.id) == warm.ineligible.end()) {
      problems.push_back("single-participant event not flagged " + e.id);
    }
  }
  if (warm.cases.size() != eligible) problems.push_back("warm case count");

  std::vector<EventRecord> held;
  for (int i = 0; i < 10; ++i) held.push_back(make_event("h" + std::to_string(i), Domain::Target, "w", participants(1 + 3 * i)));
  held.push_back(make_event("hbig", Domain::Target, "w", participants(100)));
  auto cold = make_cold_split(corpus, held);
  for (const auto& tc : cold) {
    if (corpus.find_event(tc.event_id)) problems.push_back("cold event overlaps training " + tc.event_id);
    const auto* src = &held[0];
    for (const auto& h : held)
      if (h.id == tc.event_id) src = &h;
    if (tc.positives != src->participants) problems.push_back("cold U+ not the full set " + tc.event_id);
  }
  try {
    make_cold_split(corpus, {make_event("e3", Domain::Target, "w", {users[0]})});
    problems.push_back("overlapping cold event accepted");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OverlapError) problems.push_back("overlap raised the wrong error");
  }

  SplitSpec spec;
  spec.seed = 4;
  ScoreFn random_score = [&](const std::string&, const Strings& us) {
    std::vector<double> s;
    for (std::size_t i = 0; i < us.size(); ++i) s.push_back(std::uniform_real_distribution<double>()(rng));
    return s;
  };
  std::size_t exact = 0, skipped = 0;
  for (const auto* cases : {&warm.cases, &cold}) {
    EvalReport r = evaluate(random_score, *cases, users, spec);
    for (const auto& ev : r.events) {
      if (ev.skipped) {
        ++skipped;
        if (ev.event_id != "hbig" || *ev.skipped != "PositivesExceedN") problems.push_back("unexpected skip " + ev.event_id);
      } else if (ev.ranking.size() == 100 && std::set<std::string>(ev.ranking.begin(), ev.ranking.end()).size() == 100) {
        ++exact;
      } else {
        problems.push_back("candidate list of " + std::to_string(ev.ranking.size()) + " for " + ev.event_id);
      }
    }
  }
  std::string detail = std::to_string(warm.cases.size()) + " warm cases, " + std::to_string(cold.size()) +
                       " cold cases, " + std::to_string(exact) + " lists of exactly 100, " +
                       std::to_string(skipped) + " skipped";
  if (!problems.empty()) detail += "; " + problems.front();
  return {problems.empty() && skipped == 1, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace evpart

int main(int argc, char** argv) {
  using namespace evpart;
  ::setenv("EVPART_LOG", "0", 0);
  const std::vector<Criterion> all{
      {1, "metric oracle", metrics_oracle},
      {2, "mutual information oracle", mi_oracle},
      {3, "gradient correctness", gradient_checks},
      {4, "mapping recovery", mapping_recovery},
      {5, "TransE sanity", transe_sanity},
      {6, "KL properties", kl_properties},
      {7, "pipeline determinism", determinism},
      {8, "directional transfer benefit", transfer_direction},
      {9, "random-baseline calibration", random_calibration},
      {10, "warm/cold protocol fidelity", protocol_fidelity},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.name << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
