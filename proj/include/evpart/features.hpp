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

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "evpart/corpus.hpp"
#include "evpart/embed_map.hpp"
#include "evpart/neumf.hpp"
#include "evpart/transe.hpp"

namespace evpart {

// Sources the selector draws from. Any may be null when the run does not use it.
struct SelectorInputs {
  const GraphEmbeddingTable* graph = nullptr;      // l^J (or single-domain l^T)
  const TransferMatrix* transfer = nullptr;        // base -> graph, for l^J'
  const BaseEmbeddingTable* base = nullptr;        // l^B, target users
  const NeighborSynthesizer* synthesizer = nullptr;  // graph -> base, for l^B'
};

// Per-user inputs for the graph and base towers, keyed by namespaced user key.
// Graph tower: l^J if the user is in the graph, else M l^B.
// Base tower:  l^B if the user has one, else the neighbor-synthesized l^B'.
class UserFeatures {
 public:
  UserFeatures() = default;
  UserFeatures(int graph_dim, int base_dim) : graph_dim_(graph_dim), base_dim_(base_dim) {}

  void add(const std::string& key, Vector graph, Vector base);

  int find(const std::string& key) const;
  bool contains(const std::string& key) const { return find(key) >= 0; }
  std::size_t size() const { return keys_.size(); }
  int graph_dim() const { return graph_dim_; }
  int base_dim() const { return base_dim_; }
  const Vector& graph(int i) const { return graph_[i]; }
  const Vector& base(int i) const { return base_[i]; }

  // Keys of resolvable users of one domain, sorted.
  std::vector<std::string> keys_in(Domain d) const;

 private:
  int graph_dim_ = 0;
  int base_dim_ = 0;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> keys_;
  std::vector<Vector> graph_, base_;
};

UserFeatures build_user_features(const std::vector<UserRecord>& users, const SelectorInputs& in,
                                 bool need_graph, bool need_base);

// r(e) for every event, keyed by namespaced event key.
class EventFeatures {
 public:
  void add(const std::string& key, Vector v);
  int find(const std::string& key) const;
  int dim() const { return dim_; }
  const Vector& vec(int i) const { return vecs_[i]; }
  std::size_t size() const { return vecs_.size(); }

 private:
  int dim_ = 0;
  std::unordered_map<std::string, int> index_;
  std::vector<Vector> vecs_;
};

void add_events(EventFeatures& out, const std::vector<EventRecord>& events,
                const WordVectorTable& words);

inline std::string event_key(const EventRecord& e) { return user_key(e.domain, e.id); }

struct LabeledPair {
  std::string user;   // namespaced user key
  std::string event;  // namespaced event key
  int label = 0;
};

struct IndexedPair {
  int user = 0;
  int event = 0;
  double label = 0.0;
};

std::vector<IndexedPair> index_pairs(const std::vector<LabeledPair>& pairs,
                                     const UserFeatures& users, const EventFeatures& events);

BatchInputs gather(std::span<const IndexedPair> pairs, const UserFeatures& users,
                   const EventFeatures& events);
BatchInputs gather(std::span<const IndexedPair> pairs, std::span<const std::size_t> order,
                   const UserFeatures& users, const EventFeatures& events);

}  // namespace evpart
