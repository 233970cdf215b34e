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

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evpart/corpus.hpp"
#include "evpart/transe.hpp"

namespace evpart {

// Linear map from the base space into the graph space: graph ~ M * base.
struct TransferMatrix {
  Matrix values;  // graph dim x base dim
  double lambda = 0.0;
  double residual = 0.0;  // sum of squared fit errors on the training pairs

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

struct MappingConfig {
  double lambda = 0.1;
  int k_neighbors = 5;
};

struct EmbeddingPair {
  Vector base;
  Vector graph;
};

// Ridge solution of min_M sum ||M x - y||^2 + lambda ||M||_F^2.
TransferMatrix fit_transfer_matrix(const std::vector<EmbeddingPair>& pairs, double lambda);

Vector map_base_to_graph(const TransferMatrix& m, const Vector& base);

// Mean base embedding of the K target users whose graph embeddings are most
// cosine-similar to the social user's. Ties go to the smaller user id.
class NeighborSynthesizer {
 public:
  NeighborSynthesizer(const GraphEmbeddingTable& graph, const BaseEmbeddingTable& base,
                      const MappingConfig& cfg);

  Vector synthesize(const Vector& social_graph_vector) const;
  std::vector<std::string> neighbors(const Vector& social_graph_vector) const;

 private:
  std::vector<int> top_k(const Vector& q) const;

  std::vector<std::string> ids_;
  Matrix unit_graph_;  // dim x candidates, unit columns
  Matrix base_;        // base dim x candidates
  int k_;
};

Vector synthesize_base_embedding(const std::string& social_user_id,
                                 const GraphEmbeddingTable& graph,
                                 const BaseEmbeddingTable& base, const MappingConfig& cfg);

void write_transfer_matrix(const std::filesystem::path& path, const TransferMatrix& m);
TransferMatrix read_transfer_matrix(const std::filesystem::path& path);

}  // namespace evpart
