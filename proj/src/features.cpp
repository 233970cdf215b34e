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

#include "evpart/features.hpp"

#include <algorithm>

namespace evpart {

void UserFeatures::add(const std::string& key, Vector graph, Vector base) {
  require_same_dim(graph.size(), graph_dim_, "graph feature");
  require_same_dim(base.size(), base_dim_, "base feature");
  if (index_.count(key)) throw Error(ErrorCode::IntegrityError, "duplicate user feature " + key);
  index_[key] = static_cast<int>(keys_.size());
  keys_.push_back(key);
  graph_.push_back(std::move(graph));
  base_.push_back(std::move(base));
}

int UserFeatures::find(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

std::vector<std::string> UserFeatures::keys_in(Domain d) const {
  const std::string prefix = user_key(d, "");
  std::vector<std::string> out;
  for (const auto& k : keys_) {
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

UserFeatures build_user_features(const std::vector<UserRecord>& users, const SelectorInputs& in,
                                 bool need_graph, bool need_base) {
  const int gdim = need_graph ? (in.graph ? in.graph->dim() : 0) : 0;
  const int bdim = need_base ? (in.base ? in.base->dim : 0) : 0;
  if (need_graph && !in.graph) throw Error(ErrorCode::ConfigError, "graph tower needs graph embeddings");
  if (need_base && !in.base) throw Error(ErrorCode::ConfigError, "base tower needs base embeddings");

  UserFeatures out(gdim, bdim);
  for (const auto& u : users) {
    const Entity ent{EntityKind::User, u.domain, u.id};
    std::optional<Vector> own_graph;
    if (in.graph && in.graph->contains(ent)) own_graph = in.graph->entity(ent);
    const Vector* own_base = (u.domain == Domain::Target && in.base) ? in.base->find(u.id) : nullptr;

    Vector g(0), b(0);
    if (need_graph) {
      if (own_graph) {
        g = *own_graph;
      } else if (own_base && in.transfer) {
        g = map_base_to_graph(*in.transfer, *own_base);
      } else {
        continue;
      }
    }
    if (need_base) {
      if (own_base) {
        b = *own_base;
      } else if (own_graph && in.synthesizer) {
        b = in.synthesizer->synthesize(*own_graph);
      } else {
        continue;
      }
    }
    out.add(u.key(), std::move(g), std::move(b));
  }
  return out;
}

void EventFeatures::add(const std::string& key, Vector v) {
  if (vecs_.empty()) dim_ = static_cast<int>(v.size());
  require_same_dim(v.size(), dim_, "event feature");
  if (index_.count(key)) return;
  index_[key] = static_cast<int>(vecs_.size());
  vecs_.push_back(std::move(v));
}

int EventFeatures::find(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

void add_events(EventFeatures& out, const std::vector<EventRecord>& events,
                const WordVectorTable& words) {
  for (const auto& e : events) out.add(event_key(e), embed_event(e, words));
}

std::vector<IndexedPair> index_pairs(const std::vector<LabeledPair>& pairs,
                                     const UserFeatures& users, const EventFeatures& events) {
  std::vector<IndexedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const int u = users.find(p.user);
    const int e = events.find(p.event);
    if (u < 0) throw Error(ErrorCode::UnresolvableEmbedding, "user " + p.user);
    if (e < 0) throw Error(ErrorCode::UnresolvableEmbedding, "event " + p.event);
    out.push_back({u, e, static_cast<double>(p.label)});
  }
  return out;
}

BatchInputs gather(std::span<const IndexedPair> pairs, std::span<const std::size_t> order,
                   const UserFeatures& users, const EventFeatures& events) {
  const auto n = static_cast<Eigen::Index>(order.size());
  BatchInputs in;
  in.graph_users.resize(users.graph_dim(), n);
  in.base_users.resize(users.base_dim(), n);
  in.events.resize(events.dim(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const IndexedPair& p = pairs[order[j]];
    if (users.graph_dim() > 0) in.graph_users.col(j) = users.graph(p.user);
    if (users.base_dim() > 0) in.base_users.col(j) = users.base(p.user);
    in.events.col(j) = events.vec(p.event);
  }
  return in;
}

BatchInputs gather(std::span<const IndexedPair> pairs, const UserFeatures& users,
                   const EventFeatures& events) {
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return gather(pairs, order, users, events);
}

}  // namespace evpart
