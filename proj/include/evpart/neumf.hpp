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
#include <iosfwd>
#include <optional>
#include <vector>

#include "evpart/dense.hpp"

namespace evpart {

enum class InputSpace { Graph, Base };

// One mini-batch of model inputs, one sample per column.
struct BatchInputs {
  Matrix graph_users;
  Matrix base_users;
  Matrix events;

  Eigen::Index size() const { return events.cols(); }
  const Matrix& users(InputSpace s) const { return s == InputSpace::Graph ? graph_users : base_users; }
};

struct NeumfShape {
  int user_dim = 0;
  int event_dim = 0;
  int latent = 200;
  std::vector<int> mlp_widths{256, 128, 64};
};

// GMF and MLP branches over projected user/event embeddings. The optional
// head maps the [gmf ; mlp] concat layer to a single logit.
struct NeumfParams {
  Dense gmf_user, gmf_event;
  Dense mlp_user, mlp_event;
  Dense gmf_out;
  std::vector<Dense> mlp_layers;
  std::optional<Dense> head;

  static NeumfParams init(const NeumfShape& shape, bool with_head, Rng& rng);

  NeumfShape shape() const;
  int concat_width() const;
  TensorList tensors();
};

// Intermediate activations of one tower forward pass.
struct TowerCache {
  Matrix pu_gmf, pe_gmf, hadamard;
  Matrix pu_mlp, pe_mlp;
  std::vector<Matrix> layer_inputs;  // input of each mlp layer
  std::vector<Matrix> layer_pre;     // pre-activation of each mlp layer
};

Matrix tower_forward(const NeumfParams& p, const Matrix& users, const Matrix& events,
                     TowerCache* cache);
void tower_backward(const NeumfParams& p, const Matrix& users, const Matrix& events,
                    const TowerCache& cache, const Matrix& dconcat, NeumfParams& grad);

Vector gmf_forward(const Vector& u, const Vector& e, const NeumfParams& p);
Vector mlp_forward(const Vector& u, const Vector& e, const NeumfParams& p);
// y_hat = sigmoid(head([gmf ; mlp]))
double neumf_forward(const Vector& u, const Vector& e, const NeumfParams& p);

// Single-tower predictor reading users from one embedding space.
struct NeumfModel {
  using Params = NeumfParams;
  struct Cache {
    TowerCache tower;
    Matrix concat;
  };

  NeumfParams params;
  InputSpace space = InputSpace::Base;

  static NeumfModel init(const NeumfShape& shape, InputSpace space, Rng& rng);

  Matrix logits(const BatchInputs& in, Cache* cache) const;
  void backward(const BatchInputs& in, const Cache& cache, const Matrix& dlogits,
                NeumfParams& grad) const;

  void save(std::ostream& out) const;
  static NeumfModel load(std::istream& in);
};

void write_shape(std::ostream& out, const NeumfShape& s);
NeumfShape read_shape(std::istream& in);

}  // namespace evpart
