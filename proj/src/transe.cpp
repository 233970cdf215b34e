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

#include "evpart/transe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "evpart/vector_io.hpp"

namespace evpart {

void TranseConfig::validate() const {
  if (dim <= 0) throw Error(ErrorCode::ConfigError, "transe.dim must be positive");
  if (!(margin > 0.0)) throw Error(ErrorCode::ConfigError, "transe.margin must be > 0");
  if (!(learning_rate >= 0.0)) throw Error(ErrorCode::ConfigError, "transe.learning_rate < 0");
  if (epochs < 1) throw Error(ErrorCode::ConfigError, "transe.epochs must be >= 1");
  if (negatives_per_triple < 1) {
    throw Error(ErrorCode::ConfigError, "transe.negatives_per_triple must be >= 1");
  }
}

GraphEmbeddingTable::GraphEmbeddingTable(std::vector<Entity> entities, Matrix entity_vectors,
                                         Matrix relation_vectors, EmbeddingScope scope)
    : entities_(std::move(entities)),
      entity_vectors_(std::move(entity_vectors)),
      relation_vectors_(std::move(relation_vectors)),
      scope_(scope) {
  require_same_dim(entity_vectors_.cols(), static_cast<Eigen::Index>(entities_.size()),
                   "entity vectors");
  require_same_dim(relation_vectors_.rows(), entity_vectors_.rows(), "relation vectors");
  for (std::size_t i = 0; i < entities_.size(); ++i) index_[entities_[i]] = static_cast<int>(i);
}

Vector GraphEmbeddingTable::entity(const Entity& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) {
    throw Error(ErrorCode::MissingGraphEmbedding, "no embedding for " + e.label());
  }
  return entity_vectors_.col(it->second);
}

std::map<std::string, Vector> GraphEmbeddingTable::user_vectors(Domain d) const {
  std::map<std::string, Vector> out;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    const auto& e = entities_[i];
    if (e.kind == EntityKind::User && e.domain == d) out[e.key] = entity_vectors_.col(i);
  }
  return out;
}

double transe_score(const Vector& h, const Vector& r, const Vector& t) {
  require_same_dim(h.size(), r.size(), "transe_score(h, r)");
  require_same_dim(h.size(), t.size(), "transe_score(h, t)");
  return (h + r - t).norm();
}

namespace {

int pool_index(const Entity& e) {
  return static_cast<int>(e.kind) * 2 + static_cast<int>(e.domain);
}

}  // namespace

TripleCorruptor::TripleCorruptor(const JointGraph& graph) : graph_(&graph), pools_(4) {
  const auto& ents = graph.entities();
  pool_id_.resize(ents.size());
  for (std::size_t i = 0; i < ents.size(); ++i) {
    pool_id_[i] = pool_index(ents[i]);
    pools_[pool_id_[i]].push_back(static_cast<int>(i));
  }
  for (const auto& t : graph.triples()) observed_.insert(encode(t));
}

std::uint64_t TripleCorruptor::encode(const Triple& t) const {
  const auto n = static_cast<std::uint64_t>(graph_->entities().size());
  return (static_cast<std::uint64_t>(t.head) * kNumRelations +
          static_cast<std::uint64_t>(t.relation)) * n + static_cast<std::uint64_t>(t.tail);
}

const std::vector<int>& TripleCorruptor::pool_of(int entity) const {
  return pools_[pool_id_.at(entity)];
}

Triple TripleCorruptor::corrupt(const Triple& t, Rng& rng) const {
  bool replace_head = std::bernoulli_distribution(0.5)(rng);
  // Fall back to the other slot when the chosen one has no alternative entity.
  if (pool_of(replace_head ? t.head : t.tail).size() < 2) replace_head = !replace_head;
  const int original = replace_head ? t.head : t.tail;
  const auto& pool = pool_of(original);
  if (pool.size() < 2) {
    throw Error(ErrorCode::NoCandidates,
                "no replacement entity for triple " + graph_->entities()[t.head].label());
  }

  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::optional<Triple> fallback;
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int cand = pool[pick(rng)];
    if (cand == original) continue;
    Triple out = t;
    (replace_head ? out.head : out.tail) = cand;
    if (!observed(out)) return out;
    if (!fallback) fallback = out;
  }
  if (fallback) return *fallback;
  Triple out = t;
  (replace_head ? out.head : out.tail) = pool[0] == original ? pool[1] : pool[0];
  return out;
}

Triple corrupt_triple(const Triple& t, const JointGraph& graph, Rng& rng) {
  return TripleCorruptor(graph).corrupt(t, rng);
}

namespace {

EmbeddingScope infer_scope(const std::vector<Entity>& entities) {
  bool target = false, social = false;
  for (const auto& e : entities) (e.domain == Domain::Target ? target : social) = true;
  if (target && social) return EmbeddingScope::Joint;
  return social ? EmbeddingScope::SocialOnly : EmbeddingScope::TargetOnly;
}

void normalize_columns(Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double n = m.col(j).norm();
    if (n > 0.0) m.col(j) /= n;
  }
}

}  // namespace

TranseResult train_transe(const JointGraph& graph, const TranseConfig& cfg) {
  cfg.validate();
  if (graph.empty()) throw Error(ErrorCode::EmptyGraph, "graph has no triples");

  Rng rng(cfg.seed);
  const int d = cfg.dim;
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> init(-bound, bound);

  Matrix ent(d, static_cast<Eigen::Index>(graph.entities().size()));
  Matrix rel(d, kNumRelations);
  for (Eigen::Index j = 0; j < ent.cols(); ++j)
    for (int i = 0; i < d; ++i) ent(i, j) = init(rng);
  for (Eigen::Index j = 0; j < rel.cols(); ++j)
    for (int i = 0; i < d; ++i) rel(i, j) = init(rng);
  normalize_columns(ent);

  TripleCorruptor corruptor(graph);
  const auto& triples = graph.triples();
  std::vector<std::size_t> order(triples.size());
  std::iota(order.begin(), order.end(), 0);

  TranseResult result;
  result.loss_trace.reserve(cfg.epochs);
  Vector pos_diff(d), neg_diff(d);
  const double lr = cfg.learning_rate;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      const Triple& pos = triples[idx];
      const int r = static_cast<int>(pos.relation);
      for (int k = 0; k < cfg.negatives_per_triple; ++k) {
        const Triple neg = corruptor.corrupt(pos, rng);
        pos_diff = ent.col(pos.head) + rel.col(r) - ent.col(pos.tail);
        neg_diff = ent.col(neg.head) + rel.col(r) - ent.col(neg.tail);
        const double pos_score = pos_diff.norm();
        const double neg_score = neg_diff.norm();
        const double loss = cfg.margin + pos_score - neg_score;
        if (loss <= 0.0) continue;
        total += loss;
        if (pos_score > 0.0) pos_diff /= pos_score;
        if (neg_score > 0.0) neg_diff /= neg_score;
        // d(pos_score)/dh = pos_diff, d/dt = -pos_diff; the negative enters with a minus sign.
        ent.col(pos.head) -= lr * pos_diff;
        ent.col(pos.tail) += lr * pos_diff;
        ent.col(neg.head) += lr * neg_diff;
        ent.col(neg.tail) -= lr * neg_diff;
        rel.col(r) -= lr * (pos_diff - neg_diff);
      }
    }
    normalize_columns(ent);
    result.loss_trace.push_back(
        total / static_cast<double>(triples.size() * static_cast<std::size_t>(cfg.negatives_per_triple)));
  }

  result.table = GraphEmbeddingTable(graph.entities(), std::move(ent), std::move(rel),
                                     infer_scope(graph.entities()));
  return result;
}

void write_graph_embeddings(const std::filesystem::path& path, const GraphEmbeddingTable& table) {
  VectorFile f;
  f.dim = table.dim();
  for (std::size_t i = 0; i < table.entities().size(); ++i) {
    f.entries.emplace_back(table.entities()[i].label(), table.entity_vectors().col(i));
  }
  for (int r = 0; r < kNumRelations; ++r) {
    f.entries.emplace_back("relation:" + std::string(relation_name(static_cast<Relation>(r))),
                           table.relation_vectors().col(r));
  }
  write_vector_file(path, f);
}

GraphEmbeddingTable read_graph_embeddings(const std::filesystem::path& path) {
  VectorFile f = read_vector_file(path);
  std::vector<std::pair<Entity, Vector>> ents;
  Matrix rel = Matrix::Zero(f.dim, kNumRelations);
  for (auto& [key, v] : f.entries) {
    if (key.rfind("relation:", 0) == 0) {
      rel.col(static_cast<int>(parse_relation(key.substr(9)))) = v;
    } else {
      ents.emplace_back(Entity::parse(key), std::move(v));
    }
  }
  std::sort(ents.begin(), ents.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Entity> entities;
  Matrix m(f.dim, static_cast<Eigen::Index>(ents.size()));
  for (std::size_t i = 0; i < ents.size(); ++i) {
    entities.push_back(ents[i].first);
    m.col(i) = ents[i].second;
  }
  EmbeddingScope scope = infer_scope(entities);
  return GraphEmbeddingTable(std::move(entities), std::move(m), std::move(rel), scope);
}

}  // namespace evpart
