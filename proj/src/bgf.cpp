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

#include "evpart/bgf.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace evpart {

namespace {

void prefix_into(TensorList& out, const std::string& prefix, TensorList in) {
  for (auto& [name, m] : in) out.emplace_back(prefix + name, m);
}

// In-place softmax with max subtraction.
void softmax(Vector& s) {
  s.array() -= s.maxCoeff();
  s = s.array().exp();
  s /= s.sum();
}

}  // namespace

BgfParams BgfParams::init(const BgfShape& shape, Rng& rng) {
  BgfParams p;
  p.graph_tower = NeumfParams::init(shape.graph_tower, false, rng);
  p.base_tower = NeumfParams::init(shape.base_tower, false, rng);
  const int dq = shape.graph_tower.event_dim;
  require_same_dim(shape.base_tower.event_dim, dq, "BGF towers' event dims");
  p.query_proj = Dense::identity(dq);
  p.attn_W = Matrix(dq, dq);
  glorot_init(p.attn_W, rng);
  p.head = Dense(dq, 1);
  glorot_init(p.head, rng);
  p.attention = shape.attention;
  return p;
}

TensorList BgfParams::tensors() {
  TensorList out;
  prefix_into(out, "graph.", graph_tower.tensors());
  prefix_into(out, "base.", base_tower.tensors());
  append_dense(out, "query_proj", query_proj);
  out.emplace_back("attn_W", &attn_W);
  append_dense(out, "head", head);
  return out;
}

AttentionOutput attention_context(const Vector& query, const Matrix& keys, const Matrix& W) {
  require_same_dim(W.rows(), query.size(), "attention W rows vs query");
  require_same_dim(W.cols(), keys.cols(), "attention W cols vs key width");
  if (keys.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "attention needs >= 1 key");
  AttentionOutput out;
  out.weights = keys * (W.transpose() * query);
  softmax(out.weights);
  out.context = keys.transpose() * out.weights;
  return out;
}

double bgf_forward(const Vector& graph_user, const Vector& base_user, const Vector& event,
                   const BgfParams& p) {
  BgfModel m{p};
  BatchInputs in{graph_user, base_user, event};
  return sigmoid(m.logits(in, nullptr)(0, 0));
}

BgfModel BgfModel::init(const BgfShape& shape, Rng& rng) { return BgfModel{BgfParams::init(shape, rng)}; }

Matrix BgfModel::logits(const BatchInputs& in, Cache* cache) const {
  Cache local;
  Cache& c = cache ? *cache : local;
  const auto& p = params;
  const Eigen::Index batch = in.size();
  const int dq = p.key_width();
  const int keys = p.num_keys();

  Matrix zg = tower_forward(p.graph_tower, in.graph_users, in.events, &c.graph);
  Matrix zb = tower_forward(p.base_tower, in.base_users, in.events, &c.base);
  c.stacked = Matrix::Zero(static_cast<Eigen::Index>(keys) * dq, batch);
  c.stacked.topRows(zg.rows()) = zg;
  c.stacked.middleRows(zg.rows(), zb.rows()) = zb;

  c.query = p.query_proj.forward(in.events);
  c.weights.resize(keys, batch);
  c.context.resize(dq, batch);
  Matrix v = p.attn_W.transpose() * c.query;
  for (Eigen::Index b = 0; b < batch; ++b) {
    // Column j of this map is key j: the stacked layer read row-major into J x dq.
    Eigen::Map<const Matrix> k(c.stacked.col(b).data(), dq, keys);
    Vector a;
    if (p.attention) {
      a = k.transpose() * v.col(b);
      softmax(a);
    } else {
      a = Vector::Constant(keys, 1.0 / keys);
    }
    c.weights.col(b) = a;
    c.context.col(b) = k * a;
  }
  return p.head.forward(c.context);
}

void BgfModel::backward(const BatchInputs& in, const Cache& c, const Matrix& dlogits,
                        BgfParams& grad) const {
  const auto& p = params;
  const Eigen::Index batch = in.size();
  const int dq = p.key_width();
  const int keys = p.num_keys();

  Matrix dcontext = p.head.backward(c.context, dlogits, grad.head);
  Matrix dstacked(c.stacked.rows(), batch);
  Matrix dquery = Matrix::Zero(dq, batch);
  Matrix v = p.attn_W.transpose() * c.query;
  Matrix dv = Matrix::Zero(dq, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    Eigen::Map<const Matrix> k(c.stacked.col(b).data(), dq, keys);
    Eigen::Map<Matrix> dk(dstacked.col(b).data(), dq, keys);
    const Vector a = c.weights.col(b);
    const Vector g = dcontext.col(b);
    dk.noalias() = g * a.transpose();
    if (p.attention) {
      Vector kg = k.transpose() * g;
      Vector ds = a.cwiseProduct(kg - Vector::Constant(keys, a.dot(kg)));
      dk.noalias() += v.col(b) * ds.transpose();
      dv.col(b) = k * ds;
    }
  }
  if (p.attention) {
    // v = W^T q  =>  dW = q dv^T, dq = W dv
    grad.attn_W.noalias() += c.query * dv.transpose();
    dquery.noalias() = p.attn_W * dv;
  }
  p.query_proj.backward_params(in.events, dquery, grad.query_proj);

  const Eigen::Index wg = p.graph_tower.concat_width();
  const Eigen::Index wb = p.base_tower.concat_width();
  tower_backward(p.graph_tower, in.graph_users, in.events, c.graph, dstacked.topRows(wg),
                 grad.graph_tower);
  tower_backward(p.base_tower, in.base_users, in.events, c.base, dstacked.middleRows(wg, wb),
                 grad.base_tower);
}

void BgfModel::save(std::ostream& out) const {
  out << "kind bgf\n";
  out << "attention " << (params.attention ? 1 : 0) << '\n';
  out << "graph_shape ";
  write_shape(out, params.graph_tower.shape());
  out << "base_shape ";
  write_shape(out, params.base_tower.shape());
  BgfParams copy = params;
  write_tensors(out, copy.tensors());
}

BgfModel BgfModel::load(std::istream& in) {
  std::string tag, kind;
  int attention = 1;
  if (!(in >> tag >> kind) || tag != "kind" || kind != "bgf") {
    throw Error(ErrorCode::ParseError, "checkpoint: expected 'kind bgf'");
  }
  if (!(in >> tag >> attention) || tag != "attention") {
    throw Error(ErrorCode::ParseError, "checkpoint: expected attention line");
  }
  BgfShape shape;
  if (!(in >> tag) || tag != "graph_shape") throw Error(ErrorCode::ParseError, "checkpoint: no graph_shape");
  shape.graph_tower = read_shape(in);
  if (!(in >> tag) || tag != "base_shape") throw Error(ErrorCode::ParseError, "checkpoint: no base_shape");
  shape.base_tower = read_shape(in);
  shape.attention = attention != 0;
  Rng unused(0);
  BgfModel m = init(shape, unused);
  read_tensors(in, m.params.tensors());
  return m;
}

}  // namespace evpart
