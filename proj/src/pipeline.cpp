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

#include "evpart/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <variant>

#include "json.hpp"
#include "evpart/bgf.hpp"
#include "evpart/neumf.hpp"
#include "evpart/vector_io.hpp"

namespace evpart {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Base: return "base";
    case Method::Bgf: return "bgf";
    case Method::Mix: return "mix";
    case Method::Proposed: return "proposed";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  std::string l(s);
  for (auto& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "base") return Method::Base;
  if (l == "bgf") return Method::Bgf;
  if (l == "mix") return Method::Mix;
  if (l == "proposed") return Method::Proposed;
  throw Error(ErrorCode::ConfigError, "unknown method '" + std::string(s) + "'");
}

DataPaths DataPaths::in_dir(const fs::path& dir) {
  return {dir / SynthFiles::kTargetEvents, dir / SynthFiles::kTargetUsers,
          dir / SynthFiles::kSocialEvents, dir / SynthFiles::kSocialUsers,
          dir / SynthFiles::kColdEvents,   dir / SynthFiles::kBaseEmbeddings,
          dir / SynthFiles::kWordVectors};
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

FailureClass classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return FailureClass::Config;
    case ErrorCode::IoError: return FailureClass::Io;
    case ErrorCode::DomainError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::SingularSystem:
    case ErrorCode::LengthMismatch: return FailureClass::Numeric;
    default: return FailureClass::Integrity;
  }
}

int exit_code(FailureClass c) {
  switch (c) {
    case FailureClass::Config: return 2;
    case FailureClass::Io: return 3;
    case FailureClass::Integrity: return 4;
    case FailureClass::Numeric: return 5;
  }
  return 1;
}

std::string_view failure_name(FailureClass c) {
  switch (c) {
    case FailureClass::Config: return "config error";
    case FailureClass::Io: return "io error";
    case FailureClass::Integrity: return "integrity error";
    case FailureClass::Numeric: return "numeric error";
  }
  return "error";
}

// ---------------------------------------------------------------- config

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw Error(ErrorCode::ConfigError, "unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string("bad value for '") + key + "' in " + where);
  }
}

void read_train(const json& j, TrainConfig& t, const std::string& where) {
  check_keys(j, {"learning_rate", "epochs", "batch_size", "negatives_per_positive"}, where);
  read_opt(j, "learning_rate", t.learning_rate, where);
  read_opt(j, "epochs", t.epochs, where);
  read_opt(j, "batch_size", t.batch_size, where);
  read_opt(j, "negatives_per_positive", t.negatives_per_positive, where);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + ex.what());
  }
  check_keys(j, {"method", "seed", "out_dir", "data_dir", "data", "synth", "graph", "transe",
                 "mapping", "model", "train", "teacher_train", "kd", "split"},
             "config");
  PipelineConfig c;
  std::string method = "proposed";
  read_opt(j, "method", method, "config");
  c.method = parse_method(method);
  read_opt(j, "seed", c.seed, "config");
  std::string out_dir = "run";
  read_opt(j, "out_dir", out_dir, "config");
  c.out_dir = resolve(base_dir, out_dir);

  std::string data_dir = "data";
  read_opt(j, "data_dir", data_dir, "config");
  c.data = DataPaths::in_dir(resolve(base_dir, data_dir));
  if (j.contains("data")) {
    const auto& d = j["data"];
    check_keys(d, {"target_events", "target_users", "social_events", "social_users", "cold_events",
                   "base_embeddings", "word_vectors"},
               "data");
    auto path_opt = [&](const char* key, fs::path& out) {
      std::string s;
      read_opt(d, key, s, "data");
      if (!s.empty()) out = resolve(base_dir, s);
    };
    path_opt("target_events", c.data.target_events);
    path_opt("target_users", c.data.target_users);
    path_opt("social_events", c.data.social_events);
    path_opt("social_users", c.data.social_users);
    path_opt("cold_events", c.data.cold_events);
    path_opt("base_embeddings", c.data.base_embeddings);
    path_opt("word_vectors", c.data.word_vectors);
  }

  if (j.contains("synth")) {
    const auto& s = j["synth"];
    check_keys(s, {"preset", "n_topics", "vocab_size", "vocab_overlap", "cold_events",
                   "tokens_per_event", "beta", "user_concentration", "event_concentration",
                   "word_dim", "word_noise", "base_noise", "target_users", "target_events",
                   "target_participants", "social_users", "social_events", "social_participants"},
               "synth");
    std::string preset = "meetup-100";
    read_opt(s, "preset", preset, "synth");
    SynthConfig sc = synth_preset(preset);
    read_opt(s, "n_topics", sc.n_topics, "synth");
    read_opt(s, "vocab_size", sc.vocab_size, "synth");
    read_opt(s, "vocab_overlap", sc.vocab_overlap, "synth");
    read_opt(s, "cold_events", sc.cold_events, "synth");
    read_opt(s, "tokens_per_event", sc.tokens_per_event, "synth");
    read_opt(s, "beta", sc.beta, "synth");
    read_opt(s, "user_concentration", sc.user_concentration, "synth");
    read_opt(s, "event_concentration", sc.event_concentration, "synth");
    read_opt(s, "word_dim", sc.word_dim, "synth");
    read_opt(s, "word_noise", sc.word_noise, "synth");
    read_opt(s, "base_noise", sc.base_noise, "synth");
    read_opt(s, "target_users", sc.target.users, "synth");
    read_opt(s, "target_events", sc.target.events, "synth");
    read_opt(s, "target_participants", sc.target.participants_mean, "synth");
    read_opt(s, "social_users", sc.social.users, "synth");
    read_opt(s, "social_events", sc.social.events, "synth");
    read_opt(s, "social_participants", sc.social.participants_mean, "synth");
    sc.validate();
    c.synth = sc;
  }

  if (j.contains("graph")) {
    check_keys(j["graph"], {"phi"}, "graph");
    read_opt(j["graph"], "phi", c.phi, "graph");
  }
  if (j.contains("transe")) {
    const auto& t = j["transe"];
    check_keys(t, {"dim", "margin", "learning_rate", "epochs", "negatives_per_triple"}, "transe");
    read_opt(t, "dim", c.transe.dim, "transe");
    read_opt(t, "margin", c.transe.margin, "transe");
    read_opt(t, "learning_rate", c.transe.learning_rate, "transe");
    read_opt(t, "epochs", c.transe.epochs, "transe");
    read_opt(t, "negatives_per_triple", c.transe.negatives_per_triple, "transe");
  }
  c.transe.validate();
  if (j.contains("mapping")) {
    check_keys(j["mapping"], {"lambda", "k_neighbors"}, "mapping");
    read_opt(j["mapping"], "lambda", c.mapping.lambda, "mapping");
    read_opt(j["mapping"], "k_neighbors", c.mapping.k_neighbors, "mapping");
  }
  if (!(c.mapping.lambda >= 0.0) || c.mapping.k_neighbors < 1) {
    throw Error(ErrorCode::ConfigError, "mapping needs lambda >= 0 and k_neighbors >= 1");
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    check_keys(m, {"latent", "mlp_widths", "attention", "teacher"}, "model");
    read_opt(m, "latent", c.model.latent, "model");
    read_opt(m, "mlp_widths", c.model.mlp_widths, "model");
    read_opt(m, "attention", c.model.attention, "model");
    std::string teacher = "bgf";
    read_opt(m, "teacher", teacher, "model");
    if (teacher != "bgf" && teacher != "neumf") {
      throw Error(ErrorCode::ConfigError, "model.teacher must be 'bgf' or 'neumf'");
    }
    c.model.neumf_teacher = teacher == "neumf";
  }
  if (c.model.latent < 1 || c.model.mlp_widths.empty()) {
    throw Error(ErrorCode::ConfigError, "model needs latent >= 1 and at least one MLP layer");
  }
  if (j.contains("train")) read_train(j["train"], c.train, "train");
  c.teacher_train = c.train;
  if (j.contains("teacher_train")) read_train(j["teacher_train"], c.teacher_train, "teacher_train");
  c.train.validate();
  c.teacher_train.validate();
  if (j.contains("kd")) {
    check_keys(j["kd"], {"weight", "warm_start"}, "kd");
    read_opt(j["kd"], "weight", c.kd_weight, "kd");
    read_opt(j["kd"], "warm_start", c.kd_warm_start, "kd");
  }
  if (!(c.kd_weight >= 0.0)) throw Error(ErrorCode::ConfigError, "kd.weight must be >= 0");
  if (j.contains("split")) {
    const auto& s = j["split"];
    check_keys(s, {"mode", "n", "cold_event_count"}, "split");
    std::string mode = "warm";
    read_opt(s, "mode", mode, "split");
    if (mode != "warm" && mode != "cold") {
      throw Error(ErrorCode::ConfigError, "split.mode must be 'warm' or 'cold'");
    }
    c.split.mode = mode == "warm" ? SplitMode::Warm : SplitMode::Cold;
    read_opt(s, "n", c.split.candidate_pool_size, "split");
    read_opt(s, "cold_event_count", c.split.cold_event_count, "split");
  }
  c.split.validate();
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pipeline_config(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------- stages

namespace {

int log_level() {
  const char* v = std::getenv("EVPART_LOG");
  return v ? std::atoi(v) : 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[evpart] " << msg << '\n';
}

json config_fingerprint(const PipelineConfig& c) {
  json j;
  j["method"] = method_name(c.method);
  j["seed"] = c.seed;
  j["phi"] = c.phi;
  j["transe"] = {c.transe.dim, c.transe.margin, c.transe.learning_rate, c.transe.epochs,
                 c.transe.negatives_per_triple};
  j["mapping"] = {c.mapping.lambda, c.mapping.k_neighbors};
  j["model"] = {c.model.latent, c.model.mlp_widths, c.model.attention, c.model.neumf_teacher};
  auto tc = [](const TrainConfig& t) {
    return json{t.learning_rate, t.epochs, t.batch_size, t.negatives_per_positive};
  };
  j["train"] = tc(c.train);
  j["teacher_train"] = tc(c.teacher_train);
  j["kd"] = {c.kd_weight, c.kd_warm_start};
  j["split"] = {c.split.mode == SplitMode::Warm ? "warm" : "cold", c.split.candidate_pool_size,
                c.split.cold_event_count};
  if (c.synth) {
    const auto& s = *c.synth;
    j["synth"] = {s.n_topics, s.vocab_size, s.vocab_overlap, s.target.users, s.target.events,
                  s.target.participants_mean, s.social.users, s.social.events,
                  s.social.participants_mean, s.cold_events, s.tokens_per_event, s.beta,
                  s.user_concentration, s.event_concentration, s.word_dim, s.word_noise,
                  s.base_noise};
  }
  return j;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

using AnyModel = std::variant<NeumfModel, BgfModel>;

void save_model(const fs::path& p, const AnyModel& m) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  out << "evpart-checkpoint 1\n";
  std::visit([&](const auto& model) { model.save(out); }, m);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + p.string());
}

AnyModel load_model(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + p.string());
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "evpart-checkpoint" || version != 1) {
    throw Error(ErrorCode::ParseError, p.string() + ": not an evpart checkpoint");
  }
  const auto pos = in.tellg();
  std::string tag, kind;
  in >> tag >> kind;
  in.seekg(pos);
  if (kind == "neumf") return NeumfModel::load(in);
  if (kind == "bgf") return BgfModel::load(in);
  throw Error(ErrorCode::ParseError, p.string() + ": unknown model kind '" + kind + "'");
}

void write_trace(const fs::path& p, const std::vector<EpochLoss>& trace) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  out << "epoch,partp_loss,kd_loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i + 1 << ',' << format_double(trace[i].partp) << ',' << format_double(trace[i].kd)
        << '\n';
  }
}

class Runner {
 public:
  Runner(const PipelineConfig& cfg, const RunOptions& opts) : cfg_(cfg), opts_(opts) {}

  StageResult run(const std::string& stage) {
    if (stage == "synth" && !cfg_.synth) return {stage, StageOutcome::Skipped};
    if ((stage == "build-graph" || stage == "train-kge" || stage == "fit-map") && !cfg_.uses_graph()) {
      return {stage, StageOutcome::Skipped};
    }
    const auto inputs = inputs_of(stage);
    const auto outputs = outputs_of(stage);
    for (const auto& p : inputs) {
      if (!fs::exists(p)) {
        throw Error(ErrorCode::ConfigError, "stage " + stage + ": missing input " + p.string());
      }
    }
    const std::string hash = input_hash(stage, inputs);
    if (!opts_.force && up_to_date(stage, hash, outputs)) {
      log_info(stage + ": up-to-date");
      return {stage, StageOutcome::UpToDate};
    }
    fs::create_directories(cfg_.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    log_info(stage + ": running");
    if (stage == "synth") {
      do_synth();
    } else if (stage == "build-graph") {
      do_build_graph();
    } else if (stage == "train-kge") {
      do_train_kge();
    } else if (stage == "fit-map") {
      do_fit_map();
    } else if (stage == "train") {
      do_train();
    } else if (stage == "evaluate") {
      do_evaluate();
    } else {
      throw Error(ErrorCode::ConfigError, "unknown stage '" + stage + "'");
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0).count();
    append_manifest(stage, hash, ms);
    return {stage, StageOutcome::Ran};
  }

  // Inputs the whole pipeline needs from outside (not produced by a stage).
  std::vector<fs::path> external_inputs() const {
    if (cfg_.synth) return {};
    auto v = target_files();
    if (cfg_.uses_social()) {
      v.push_back(cfg_.data.social_events);
      v.push_back(cfg_.data.social_users);
    }
    return v;
  }

 private:
  fs::path art(const char* name) const { return cfg_.out_dir / name; }

  std::vector<fs::path> target_files() const {
    std::vector<fs::path> v{cfg_.data.target_events, cfg_.data.target_users,
                            cfg_.data.base_embeddings, cfg_.data.word_vectors};
    if (cfg_.split.mode == SplitMode::Cold) v.push_back(cfg_.data.cold_events);
    return v;
  }

  std::vector<fs::path> inputs_of(const std::string& stage) const {
    std::vector<fs::path> v;
    if (stage == "synth") return v;
    v = target_files();
    if (cfg_.uses_social() && stage != "train-kge") {
      v.push_back(cfg_.data.social_events);
      v.push_back(cfg_.data.social_users);
    }
    if (stage == "build-graph") return v;
    if (stage == "train-kge") return {art(Artifacts::kGraph)};
    if (cfg_.uses_graph()) v.push_back(art(Artifacts::kGraphEmbeddings));
    if (stage == "fit-map") return v;
    if (cfg_.uses_graph()) v.push_back(art(Artifacts::kTransfer));
    if (cfg_.uses_social()) v.push_back(art(Artifacts::kSynthBase));
    if (stage == "evaluate") v.push_back(art(Artifacts::kModel));
    return v;
  }

  std::vector<fs::path> outputs_of(const std::string& stage) const {
    if (stage == "synth") {
      auto d = cfg_.data;
      return {d.target_events, d.target_users, d.social_events, d.social_users,
              d.cold_events, d.base_embeddings, d.word_vectors};
    }
    if (stage == "build-graph") return {art(Artifacts::kGraph)};
    if (stage == "train-kge") return {art(Artifacts::kGraphEmbeddings)};
    if (stage == "fit-map") {
      if (cfg_.uses_social()) return {art(Artifacts::kTransfer), art(Artifacts::kSynthBase)};
      return {art(Artifacts::kTransfer)};
    }
    if (stage == "train") return {art(Artifacts::kModel), art(Artifacts::kLossTrace)};
    if (stage == "evaluate") return {art(Artifacts::kReport), art(Artifacts::kSummary)};
    return {};
  }

  std::string input_hash(const std::string& stage, const std::vector<fs::path>& inputs) const {
    std::uint64_t h = fnv1a(stage);
    h = fnv1a(config_fingerprint(cfg_).dump(), h);
    for (const auto& p : inputs) h = fnv1a(read_file(p), h);
    return hex64(h);
  }

  bool up_to_date(const std::string& stage, const std::string& hash,
                  const std::vector<fs::path>& outputs) const {
    std::ifstream in(art(Artifacts::kManifest));
    if (!in) return false;
    std::string line, last_hash;
    while (std::getline(in, line)) {
      std::istringstream ss(line);
      std::string s, hsh;
      if (ss >> s >> hsh && s == stage) last_hash = hsh;
    }
    if (last_hash != hash) return false;
    for (const auto& p : outputs) {
      if (!fs::exists(p)) return false;
    }
    return true;
  }

  void append_manifest(const std::string& stage, const std::string& hash, long long ms) const {
    std::ofstream out(art(Artifacts::kManifest), std::ios::app);
    out << stage << '\t' << hash << '\t' << cfg_.seed << '\t' << ms << "ms\n";
  }

  // ---- shared loading

  void load_target() {
    if (train_target_) return;
    auto loaded = load_corpus(Domain::Target, cfg_.data.target_events, cfg_.data.target_users,
                              cfg_.data.base_embeddings, cfg_.data.word_vectors);
    words_ = std::move(loaded.words);
    full_target_ = std::move(loaded.corpus);
    if (cfg_.split.mode == SplitMode::Warm) {
      WarmSplit split = make_warm_split(*full_target_, derive_seed(cfg_.seed, "split"));
      train_target_ = std::move(split.train);
      cases_ = std::move(split.cases);
      eval_events_ = train_target_->events();
      if (!split.ineligible.empty()) {
        log_info(std::to_string(split.ineligible.size()) + " single-participant events not held out");
      }
    } else {
      train_target_ = *full_target_;
      auto held = read_events(cfg_.data.cold_events);
      if (static_cast<int>(held.size()) > cfg_.split.cold_event_count) {
        held.resize(static_cast<std::size_t>(cfg_.split.cold_event_count));
      }
      for (const auto& e : held) {
        if (e.domain != Domain::Target) {
          throw Error(ErrorCode::IntegrityError, "cold event '" + e.id + "' is not a target event");
        }
        for (const auto& u : e.participants) {
          if (!full_target_->has_user(u)) {
            throw Error(ErrorCode::IntegrityError,
                        "cold event '" + e.id + "' references unknown user '" + u + "'");
          }
        }
      }
      cases_ = make_cold_split(*train_target_, held);
      eval_events_ = std::move(held);
    }
  }

  void load_social() {
    if (social_) return;
    social_ = Corpus::build(Domain::Social, read_events(cfg_.data.social_events),
                            read_users(cfg_.data.social_users));
  }

  // ---- stages

  void do_synth() {
    SynthConfig sc = *cfg_.synth;
    sc.seed = derive_seed(cfg_.seed, "synth");
    if (cfg_.split.mode == SplitMode::Cold) sc.cold_events = std::max(sc.cold_events, cfg_.split.cold_event_count);
    SynthData data = generate(sc);
    const auto& d = cfg_.data;
    for (const auto* p : {&d.target_events, &d.target_users, &d.social_events, &d.social_users,
                          &d.cold_events, &d.base_embeddings, &d.word_vectors}) {
      if (p->has_parent_path()) fs::create_directories(p->parent_path());
    }
    write_events(d.target_events, data.target.events());
    write_users(d.target_users, data.target.users());
    write_events(d.social_events, data.social.events());
    write_users(d.social_users, data.social.users());
    write_events(d.cold_events, data.cold_events);
    write_base_embeddings(d.base_embeddings, data.base);
    write_word_vectors(d.word_vectors, data.words);
  }

  void do_build_graph() {
    load_target();
    JointGraph g;
    if (cfg_.uses_social()) {
      load_social();
      g = build_joint_graph(*train_target_, *social_, cfg_.phi);
    } else {
      g = build_single_domain_graph(*train_target_, cfg_.phi);
    }
    log_info("graph: " + std::to_string(g.entities().size()) + " entities, " +
             std::to_string(g.triples().size()) + " triples (" +
             std::to_string(g.count(Relation::SameWord)) + " same-word)");
    write_graph_tsv(art(Artifacts::kGraph), g);
  }

  void do_train_kge() {
    JointGraph g = read_graph_tsv(art(Artifacts::kGraph));
    TranseConfig tc = cfg_.transe;
    tc.seed = derive_seed(cfg_.seed, "transe");
    TranseResult r = train_transe(g, tc);
    write_graph_embeddings(art(Artifacts::kGraphEmbeddings), r.table);
    std::ofstream out(art(Artifacts::kTranseLoss));
    out << "epoch,loss\n";
    for (std::size_t i = 0; i < r.loss_trace.size(); ++i) {
      out << i + 1 << ',' << format_double(r.loss_trace[i]) << '\n';
    }
  }

  void do_fit_map() {
    load_target();
    GraphEmbeddingTable graph = read_graph_embeddings(art(Artifacts::kGraphEmbeddings));
    const auto& base = train_target_->base();
    std::vector<EmbeddingPair> pairs;
    for (const auto& [id, g] : graph.user_vectors(Domain::Target)) {
      if (const Vector* b = base.find(id)) pairs.push_back({*b, g});
    }
    TransferMatrix m = fit_transfer_matrix(pairs, cfg_.mapping.lambda);
    log_info("transfer matrix fit on " + std::to_string(pairs.size()) + " users, residual " +
             format_double(m.residual));
    write_transfer_matrix(art(Artifacts::kTransfer), m);
    if (cfg_.uses_social()) {
      NeighborSynthesizer synth(graph, base, cfg_.mapping);
      VectorFile f;
      f.dim = base.dim;
      for (const auto& [id, g] : graph.user_vectors(Domain::Social)) {
        f.entries.emplace_back(id, synth.synthesize(g));
      }
      write_vector_file(art(Artifacts::kSynthBase), f);
    }
  }

  struct Features {
    UserFeatures users;
    EventFeatures events;
  };

  Features build_features(bool include_social) {
    load_target();
    std::optional<GraphEmbeddingTable> graph;
    std::optional<TransferMatrix> transfer;
    std::map<std::string, Vector> synth_base;
    BaseEmbeddingTable combined_base = train_target_->base();
    if (cfg_.uses_graph()) {
      graph = read_graph_embeddings(art(Artifacts::kGraphEmbeddings));
      transfer = read_transfer_matrix(art(Artifacts::kTransfer));
    }
    std::vector<UserRecord> users = train_target_->users();
    if (include_social) {
      load_social();
      users.insert(users.end(), social_->users().begin(), social_->users().end());
    }
    SelectorInputs in;
    in.graph = graph ? &*graph : nullptr;
    in.transfer = transfer ? &*transfer : nullptr;
    in.base = &combined_base;
    Features f;
    const bool need_graph = cfg_.uses_graph() && !(cfg_.method == Method::Base);
    const bool need_base = !(cfg_.model.neumf_teacher && cfg_.uses_social());
    // Social users take their synthesized base vector from the fit-map artifact.
    std::vector<UserRecord> target_users, social_users;
    for (const auto& u : users) (u.domain == Domain::Target ? target_users : social_users).push_back(u);
    f.users = build_user_features(target_users, in, need_graph, need_base);
    if (include_social) {
      VectorFile sb = read_vector_file(art(Artifacts::kSynthBase));
      std::map<std::string, Vector> by_id(sb.entries.begin(), sb.entries.end());
      for (const auto& u : social_users) {
        const Entity ent{EntityKind::User, Domain::Social, u.id};
        if (!graph->contains(ent)) continue;
        auto it = by_id.find(u.id);
        if (need_base && it == by_id.end()) continue;
        f.users.add(u.key(), need_graph ? graph->entity(ent) : Vector(0),
                    need_base ? it->second : Vector(0));
      }
      add_events(f.events, social_->events(), words_);
    }
    add_events(f.events, train_target_->events(), words_);
    add_events(f.events, eval_events_, words_);
    return f;
  }

  AnyModel fresh_model(const Features& f) const {
    Rng rng(derive_seed(cfg_.seed, "init"));
    const int edim = f.events.dim();
    auto shape = [&](int user_dim) {
      NeumfShape s;
      s.user_dim = user_dim;
      s.event_dim = edim;
      s.latent = cfg_.model.latent;
      s.mlp_widths = cfg_.model.mlp_widths;
      return s;
    };
    if (cfg_.method == Method::Base) {
      return NeumfModel::init(shape(f.users.base_dim()), InputSpace::Base, rng);
    }
    if (cfg_.model.neumf_teacher && cfg_.uses_social()) {
      return NeumfModel::init(shape(f.users.graph_dim()), InputSpace::Graph, rng);
    }
    BgfShape s{shape(f.users.graph_dim()), shape(f.users.base_dim()), cfg_.model.attention};
    return BgfModel::init(s, rng);
  }

  std::vector<LabeledPair> pairs_for(const Corpus& corpus, const UserFeatures& users,
                                     Domain d, const char* stream) const {
    Rng rng(derive_seed(cfg_.seed, stream));
    return sample_negatives(interactions_of(corpus), users.keys_in(d),
                            cfg_.train.negatives_per_positive, rng);
  }

  void do_train() {
    Features f = build_features(cfg_.uses_social());
    auto target_pairs = index_pairs(pairs_for(*train_target_, f.users, Domain::Target, "negatives.target"),
                                    f.users, f.events);
    TrainConfig tc = cfg_.train;
    tc.seed = derive_seed(cfg_.seed, "train");
    TrainConfig teacher_tc = cfg_.teacher_train;
    teacher_tc.seed = derive_seed(cfg_.seed, "teacher");

    AnyModel model = fresh_model(f);
    std::visit(
        [&](auto& m) {
          using M = std::decay_t<decltype(m)>;
          if (cfg_.method == Method::Base || cfg_.method == Method::Bgf) {
            write_trace(art(Artifacts::kLossTrace),
                        train_model(m, target_pairs, f.users, f.events, tc));
            return;
          }
          auto social_pairs = index_pairs(
              pairs_for(*social_, f.users, Domain::Social, "negatives.social"), f.users, f.events);
          if (cfg_.method == Method::Mix) {
            MixResult r = train_mix(m, social_pairs, target_pairs, f.users, f.events, tc);
            write_trace(art(Artifacts::kLossTrace), r.trace);
            return;
          }
          KdConfig kc{teacher_tc, tc, cfg_.kd_weight, cfg_.kd_warm_start};
          CrossDomainResult<M> r =
              train_cross_domain(social_pairs, target_pairs, f.users, f.events, kc, m);
          write_trace(art(Artifacts::kTeacherTrace), r.teacher_trace);
          write_trace(art(Artifacts::kLossTrace), r.student_trace);
          save_model(art(Artifacts::kTeacher), r.teacher);
          m = std::move(r.student);
        },
        model);
    save_model(art(Artifacts::kModel), model);
  }

  void do_evaluate() {
    Features f = build_features(false);
    AnyModel model = load_model(art(Artifacts::kModel));
    std::vector<std::string> pool;
    for (const auto& u : full_target_->users()) pool.push_back(u.id);
    ScoreFn score = [&](const std::string& event_id, const std::vector<std::string>& users) {
      std::vector<LabeledPair> lp;
      for (const auto& u : users) lp.push_back({user_key(Domain::Target, u), user_key(Domain::Target, event_id), 0});
      auto idx = index_pairs(lp, f.users, f.events);
      BatchInputs in = gather(idx, f.users, f.events);
      Vector p = std::visit([&](const auto& m) { return predict(m, in); }, model);
      return std::vector<double>(p.data(), p.data() + p.size());
    };
    SplitSpec spec = cfg_.split;
    spec.seed = derive_seed(cfg_.seed, "candidates");
    EvalReport r = evaluate(score, cases_, pool, spec, std::string(method_name(cfg_.method)));
    log_info("evaluate: recall@10 = " + format_double(r.mean_recall10) +
             ", precision@5 = " + format_double(r.mean_precision5) + " over " +
             std::to_string(r.evaluated) + " events");
    std::ofstream(art(Artifacts::kReport)) << r.to_json();
    std::ofstream(art(Artifacts::kSummary)) << r.summary_tsv();
  }

  const PipelineConfig& cfg_;
  RunOptions opts_;
  WordVectorTable words_;
  std::optional<Corpus> full_target_;
  std::optional<Corpus> train_target_;
  std::optional<Corpus> social_;
  std::vector<TestCase> cases_;
  std::vector<EventRecord> eval_events_;
};

}  // namespace

std::vector<StageResult> run_stage(const std::string& subcommand, const PipelineConfig& cfg,
                                   const RunOptions& opts) {
  static const std::vector<std::string> kStages{"synth",   "build-graph", "train-kge",
                                                "fit-map", "train",       "evaluate"};
  Runner runner(cfg, opts);
  std::vector<StageResult> out;
  if (subcommand == "pipeline") {
    for (const auto& p : runner.external_inputs()) {
      if (!fs::exists(p)) throw Error(ErrorCode::ConfigError, "missing input " + p.string());
    }
    for (const auto& s : kStages) out.push_back(runner.run(s));
    return out;
  }
  if (std::find(kStages.begin(), kStages.end(), subcommand) == kStages.end()) {
    throw Error(ErrorCode::ConfigError, "unknown subcommand '" + subcommand + "'");
  }
  out.push_back(runner.run(subcommand));
  return out;
}

}  // namespace evpart
