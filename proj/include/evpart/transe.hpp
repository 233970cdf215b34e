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
#include <unordered_set>
#include <vector>

#include "evpart/joint_graph.hpp"

namespace evpart {

enum class EmbeddingScope { Joint, TargetOnly, SocialOnly };

struct TranseConfig {
  int dim = 200;
  double margin = 1.0;
  double learning_rate = 0.01;
  int epochs = 200;
  int negatives_per_triple = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Entity and relation vectors learned from a graph. Entity vectors are unit norm.
class GraphEmbeddingTable {
 public:
  GraphEmbeddingTable() = default;
  GraphEmbeddingTable(std::vector<Entity> entities, Matrix entity_vectors,
                      Matrix relation_vectors, EmbeddingScope scope);

  int dim() const { return static_cast<int>(entity_vectors_.rows()); }
  EmbeddingScope scope() const { return scope_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const Matrix& entity_vectors() const { return entity_vectors_; }
  const Matrix& relation_vectors() const { return relation_vectors_; }

  // nullptr-like: returns false when absent.
  bool contains(const Entity& e) const { return index_.count(e) != 0; }
  Vector entity(const Entity& e) const;
  Vector relation(Relation r) const { return relation_vectors_.col(static_cast<int>(r)); }

  // User vectors of one domain, keyed by raw user id.
  std::map<std::string, Vector> user_vectors(Domain d) const;

 private:
  std::vector<Entity> entities_;
  Matrix entity_vectors_;    // dim x |entities|
  Matrix relation_vectors_;  // dim x kNumRelations
  EmbeddingScope scope_ = EmbeddingScope::Joint;
  std::map<Entity, int> index_;
};

struct TranseResult {
  GraphEmbeddingTable table;
  std::vector<double> loss_trace;  // mean hinge loss per epoch
};

// ||h + r - t||_2
double transe_score(const Vector& h, const Vector& r, const Vector& t);

// Negative sampler over a fixed graph: entity pools per (kind, domain) and the
// set of observed triples used to reject false negatives.
class TripleCorruptor {
 public:
  explicit TripleCorruptor(const JointGraph& graph);

  Triple corrupt(const Triple& t, Rng& rng) const;
  bool observed(const Triple& t) const { return observed_.count(encode(t)) != 0; }
  const std::vector<int>& pool_of(int entity) const;

 private:
  std::uint64_t encode(const Triple& t) const;

  const JointGraph* graph_;
  std::vector<std::vector<int>> pools_;  // indexed by kind * 2 + domain
  std::vector<int> pool_id_;             // entity -> pool
  std::unordered_set<std::uint64_t> observed_;
};

Triple corrupt_triple(const Triple& t, const JointGraph& graph, Rng& rng);

TranseResult train_transe(const JointGraph& graph, const TranseConfig& cfg);

void write_graph_embeddings(const std::filesystem::path& path, const GraphEmbeddingTable& table);
GraphEmbeddingTable read_graph_embeddings(const std::filesystem::path& path);

}  // namespace evpart
