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

#include <iosfwd>

#include "evpart/neumf.hpp"

namespace evpart {

struct BgfShape {
  NeumfShape graph_tower;
  NeumfShape base_tower;
  bool attention = true;  // false: context is the plain mean of the keys
};

// Base-and-graph fusion: two headless NeuMF towers whose concat layers are
// stacked, zero-padded to a multiple of the query width and read row-major
// as attention keys. The event embedding, projected to the key width, is the
// query; a linear head on the context vector gives the logit.
struct BgfParams {
  NeumfParams graph_tower;
  NeumfParams base_tower;
  Dense query_proj;  // event dim -> key width
  Matrix attn_W;     // key width x key width ("general" score)
  Dense head;        // key width -> 1
  bool attention = true;

  static BgfParams init(const BgfShape& shape, Rng& rng);

  int key_width() const { return static_cast<int>(attn_W.rows()); }
  int stacked_width() const { return graph_tower.concat_width() + base_tower.concat_width(); }
  int num_keys() const { return (stacked_width() + key_width() - 1) / key_width(); }
  TensorList tensors();
};

struct AttentionOutput {
  Vector context;
  Vector weights;
};

// weights = softmax_j(query^T W key_j); context = sum_j weights_j key_j.
// keys holds one key per row.
AttentionOutput attention_context(const Vector& query, const Matrix& keys, const Matrix& W);

double bgf_forward(const Vector& graph_user, const Vector& base_user, const Vector& event,
                   const BgfParams& p);

struct BgfModel {
  using Params = BgfParams;
  struct Cache {
    TowerCache graph, base;
    Matrix stacked;   // padded [graph concat ; base concat], one sample per column
    Matrix query;     // projected events
    Matrix weights;   // J x batch
    Matrix context;   // key width x batch
  };

  BgfParams params;

  static BgfModel init(const BgfShape& shape, Rng& rng);

  Matrix logits(const BatchInputs& in, Cache* cache) const;
  void backward(const BatchInputs& in, const Cache& cache, const Matrix& dlogits,
                BgfParams& grad) const;

  void save(std::ostream& out) const;
  static BgfModel load(std::istream& in);
};

}  // namespace evpart
