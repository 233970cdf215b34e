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

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "evpart/corpus.hpp"

namespace evpart {

enum class EntityKind { User, Word };
enum class Relation { Participation = 0, CoOccurrence = 1, SameWord = 2 };
inline constexpr int kNumRelations = 3;

std::string_view relation_name(Relation r);
Relation parse_relation(std::string_view s);

struct Entity {
  EntityKind kind = EntityKind::User;
  Domain domain = Domain::Target;
  std::string key;

  // "user:target:alice", "word:social:wine"
  std::string label() const;
  static Entity parse(std::string_view label);

  friend bool operator<(const Entity& a, const Entity& b) {
    return std::tie(a.kind, a.domain, a.key) < std::tie(b.kind, b.domain, b.key);
  }
  friend bool operator==(const Entity& a, const Entity& b) {
    return a.kind == b.kind && a.domain == b.domain && a.key == b.key;
  }
};

struct Triple {
  int head = 0;
  Relation relation = Relation::Participation;
  int tail = 0;

  friend bool operator<(const Triple& a, const Triple& b) {
    return std::tie(a.head, a.relation, a.tail) < std::tie(b.head, b.relation, b.tail);
  }
  friend bool operator==(const Triple& a, const Triple& b) {
    return a.head == b.head && a.relation == b.relation && a.tail == b.tail;
  }
};

// Entities are kept sorted; triples index into them and are sorted too, so
// two graphs built from the same inputs are identical element for element.
class JointGraph {
 public:
  JointGraph() = default;
  JointGraph(std::vector<Entity> entities, std::vector<Triple> triples, double phi);

  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Triple>& triples() const { return triples_; }
  double phi() const { return phi_; }
  bool empty() const { return triples_.empty(); }

  // -1 when absent.
  int find(const Entity& e) const;
  std::size_t count(Relation r) const;

 private:
  std::vector<Entity> entities_;
  std::vector<Triple> triples_;
  double phi_ = 0.0;
  std::map<Entity, int> index_;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(n_both * n_events / (n1 * n2)); -inf when the pair never co-occurs.
double mutual_information(long n_both, long n1, long n2, long n_events);

inline const double kDefaultPhi = std::log(2.0);

JointGraph build_joint_graph(const Corpus& target, const Corpus& social, double phi);

// Same construction restricted to one domain: no same-word bridges.
JointGraph build_single_domain_graph(const Corpus& corpus, double phi);

void write_graph_tsv(const std::filesystem::path& path, const JointGraph& g);
JointGraph read_graph_tsv(const std::filesystem::path& path);

}  // namespace evpart
