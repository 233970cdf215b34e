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

#include "evpart/neumf.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace evpart {

NeumfParams NeumfParams::init(const NeumfShape& s, bool with_head, Rng& rng) {
  if (s.user_dim <= 0 || s.event_dim <= 0 || s.latent <= 0 || s.mlp_widths.empty()) {
    throw Error(ErrorCode::ConfigError, "NeuMF shape needs positive dims and >= 1 MLP layer");
  }
  NeumfParams p;
  p.gmf_user = Dense(s.user_dim, s.latent);
  p.gmf_event = Dense(s.event_dim, s.latent);
  p.mlp_user = Dense(s.user_dim, s.latent);
  p.mlp_event = Dense(s.event_dim, s.latent);
  p.gmf_out = Dense(s.latent, s.latent);
  for (Dense* d : {&p.gmf_user, &p.gmf_event, &p.mlp_user, &p.mlp_event, &p.gmf_out}) {
    glorot_init(*d, rng);
  }
  int in = 2 * s.latent;
  for (int w : s.mlp_widths) {
    if (w <= 0) throw Error(ErrorCode::ConfigError, "MLP widths must be positive");
    Dense d(in, w);
    glorot_init(d, rng);
    p.mlp_layers.push_back(std::move(d));
    in = w;
  }
  if (with_head) {
    Dense h(p.concat_width(), 1);
    glorot_init(h, rng);
    p.head = std::move(h);
  }
  return p;
}

NeumfShape NeumfParams::shape() const {
  NeumfShape s;
  s.user_dim = gmf_user.in();
  s.event_dim = gmf_event.in();
  s.latent = gmf_user.out();
  s.mlp_widths.clear();
  for (const auto& l : mlp_layers) s.mlp_widths.push_back(l.out());
  return s;
}

int NeumfParams::concat_width() const {
  return gmf_out.out() + (mlp_layers.empty() ? 0 : mlp_layers.back().out());
}

TensorList NeumfParams::tensors() {
  TensorList out;
  append_dense(out, "gmf_user", gmf_user);
  append_dense(out, "gmf_event", gmf_event);
  append_dense(out, "mlp_user", mlp_user);
  append_dense(out, "mlp_event", mlp_event);
  append_dense(out, "gmf_out", gmf_out);
  for (std::size_t i = 0; i < mlp_layers.size(); ++i) {
    append_dense(out, "mlp." + std::to_string(i), mlp_layers[i]);
  }
  if (head) append_dense(out, "head", *head);
  return out;
}

Matrix tower_forward(const NeumfParams& p, const Matrix& users, const Matrix& events,
                     TowerCache* cache) {
  require_same_dim(users.rows(), p.gmf_user.in(), "tower user input");
  require_same_dim(events.rows(), p.gmf_event.in(), "tower event input");
  require_same_dim(users.cols(), events.cols(), "tower batch size");
  TowerCache local;
  TowerCache& c = cache ? *cache : local;

  c.pu_gmf = p.gmf_user.forward(users);
  c.pe_gmf = p.gmf_event.forward(events);
  c.hadamard = c.pu_gmf.cwiseProduct(c.pe_gmf);
  Matrix gmf = p.gmf_out.forward(c.hadamard);

  c.pu_mlp = p.mlp_user.forward(users);
  c.pe_mlp = p.mlp_event.forward(events);
  Matrix act(c.pu_mlp.rows() + c.pe_mlp.rows(), users.cols());
  act << c.pu_mlp, c.pe_mlp;
  c.layer_inputs.clear();
  c.layer_pre.clear();
  for (std::size_t i = 0; i < p.mlp_layers.size(); ++i) {
    Matrix z = p.mlp_layers[i].forward(act);
    c.layer_inputs.push_back(std::move(act));
    act = i + 1 < p.mlp_layers.size() ? Matrix(z.cwiseMax(0.0)) : z;
    c.layer_pre.push_back(std::move(z));
  }

  Matrix concat(gmf.rows() + act.rows(), users.cols());
  concat << gmf, act;
  return concat;
}

void tower_backward(const NeumfParams& p, const Matrix& users, const Matrix& events,
                    const TowerCache& c, const Matrix& dconcat, NeumfParams& grad) {
  const Eigen::Index g = p.gmf_out.out();
  Matrix dgmf = dconcat.topRows(g);
  Matrix da = dconcat.bottomRows(dconcat.rows() - g);

  Matrix dh = p.gmf_out.backward(c.hadamard, dgmf, grad.gmf_out);
  p.gmf_user.backward_params(users, dh.cwiseProduct(c.pe_gmf), grad.gmf_user);
  p.gmf_event.backward_params(events, dh.cwiseProduct(c.pu_gmf), grad.gmf_event);

  for (std::size_t k = p.mlp_layers.size(); k-- > 0;) {
    Matrix dz = k + 1 < p.mlp_layers.size()
                    ? Matrix(da.cwiseProduct((c.layer_pre[k].array() > 0.0).cast<double>().matrix()))
                    : da;
    da = p.mlp_layers[k].backward(c.layer_inputs[k], dz, grad.mlp_layers[k]);
  }
  const Eigen::Index l = p.mlp_user.out();
  p.mlp_user.backward_params(users, da.topRows(l), grad.mlp_user);
  p.mlp_event.backward_params(events, da.bottomRows(da.rows() - l), grad.mlp_event);
}

Vector gmf_forward(const Vector& u, const Vector& e, const NeumfParams& p) {
  require_same_dim(u.size(), p.gmf_user.in(), "gmf user input");
  require_same_dim(e.size(), p.gmf_event.in(), "gmf event input");
  Matrix h = p.gmf_user.forward(u).cwiseProduct(p.gmf_event.forward(e));
  return p.gmf_out.forward(h).col(0);
}

Vector mlp_forward(const Vector& u, const Vector& e, const NeumfParams& p) {
  require_same_dim(u.size(), p.mlp_user.in(), "mlp user input");
  require_same_dim(e.size(), p.mlp_event.in(), "mlp event input");
  Vector pu = p.mlp_user.forward(u).col(0);
  Vector pe = p.mlp_event.forward(e).col(0);
  Vector act(pu.size() + pe.size());
  act << pu, pe;
  for (std::size_t i = 0; i < p.mlp_layers.size(); ++i) {
    Vector z = p.mlp_layers[i].forward(act).col(0);
    act = i + 1 < p.mlp_layers.size() ? Vector(z.cwiseMax(0.0)) : z;
  }
  return act;
}

double neumf_forward(const Vector& u, const Vector& e, const NeumfParams& p) {
  if (!p.head) throw Error(ErrorCode::DimensionMismatch, "NeuMF params have no head");
  Vector g = gmf_forward(u, e, p);
  Vector m = mlp_forward(u, e, p);
  Vector z(g.size() + m.size());
  z << g, m;
  return sigmoid(p.head->forward(z)(0, 0));
}

NeumfModel NeumfModel::init(const NeumfShape& shape, InputSpace space, Rng& rng) {
  NeumfModel m;
  m.params = NeumfParams::init(shape, true, rng);
  m.space = space;
  return m;
}

Matrix NeumfModel::logits(const BatchInputs& in, Cache* cache) const {
  Cache local;
  Cache& c = cache ? *cache : local;
  c.concat = tower_forward(params, in.users(space), in.events, &c.tower);
  return params.head->forward(c.concat);
}

void NeumfModel::backward(const BatchInputs& in, const Cache& c, const Matrix& dlogits,
                          NeumfParams& grad) const {
  Matrix dconcat = params.head->backward(c.concat, dlogits, *grad.head);
  tower_backward(params, in.users(space), in.events, c.tower, dconcat, grad);
}

void write_shape(std::ostream& out, const NeumfShape& s) {
  out << s.user_dim << ' ' << s.event_dim << ' ' << s.latent << ' ' << s.mlp_widths.size();
  for (int w : s.mlp_widths) out << ' ' << w;
  out << '\n';
}

NeumfShape read_shape(std::istream& in) {
  NeumfShape s;
  std::size_t n = 0;
  if (!(in >> s.user_dim >> s.event_dim >> s.latent >> n) || n == 0 || n > 64) {
    throw Error(ErrorCode::ParseError, "checkpoint: bad shape line");
  }
  s.mlp_widths.resize(n);
  for (auto& w : s.mlp_widths) {
    if (!(in >> w)) throw Error(ErrorCode::ParseError, "checkpoint: bad shape widths");
  }
  return s;
}

void NeumfModel::save(std::ostream& out) const {
  out << "kind neumf\n";
  out << "space " << (space == InputSpace::Graph ? "graph" : "base") << '\n';
  out << "shape ";
  write_shape(out, params.shape());
  NeumfParams copy = params;
  write_tensors(out, copy.tensors());
}

NeumfModel NeumfModel::load(std::istream& in) {
  std::string tag, kind, space;
  if (!(in >> tag >> kind) || tag != "kind" || kind != "neumf") {
    throw Error(ErrorCode::ParseError, "checkpoint: expected 'kind neumf'");
  }
  if (!(in >> tag >> space) || tag != "space") {
    throw Error(ErrorCode::ParseError, "checkpoint: expected space line");
  }
  if (!(in >> tag) || tag != "shape") throw Error(ErrorCode::ParseError, "checkpoint: no shape");
  NeumfShape shape = read_shape(in);
  Rng unused(0);
  NeumfModel m = init(shape, space == "graph" ? InputSpace::Graph : InputSpace::Base, unused);
  read_tensors(in, m.params.tensors());
  return m;
}

}  // namespace evpart
