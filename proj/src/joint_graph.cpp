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

#include "evpart/joint_graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "evpart/vector_io.hpp"

namespace evpart {

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::Participation: return "participation";
    case Relation::CoOccurrence: return "co_occurrence";
    case Relation::SameWord: return "same_word";
  }
  return "?";
}

Relation parse_relation(std::string_view s) {
  if (s == "participation") return Relation::Participation;
  if (s == "co_occurrence") return Relation::CoOccurrence;
  if (s == "same_word") return Relation::SameWord;
  throw Error(ErrorCode::ParseError, "unknown relation '" + std::string(s) + "'");
}

std::string Entity::label() const {
  return std::string(kind == EntityKind::User ? "user" : "word") + ":" +
         std::string(domain_name(domain)) + ":" + key;
}

Entity Entity::parse(std::string_view label) {
  auto c1 = label.find(':');
  auto c2 = c1 == std::string_view::npos ? c1 : label.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw Error(ErrorCode::ParseError, "bad entity label '" + std::string(label) + "'");
  }
  Entity e;
  auto kind = label.substr(0, c1);
  if (kind == "user") {
    e.kind = EntityKind::User;
  } else if (kind == "word") {
    e.kind = EntityKind::Word;
  } else {
    throw Error(ErrorCode::ParseError, "bad entity kind '" + std::string(kind) + "'");
  }
  e.domain = parse_domain(label.substr(c1 + 1, c2 - c1 - 1));
  e.key = std::string(label.substr(c2 + 1));
  return e;
}

JointGraph::JointGraph(std::vector<Entity> entities, std::vector<Triple> triples, double phi)
    : entities_(std::move(entities)), triples_(std::move(triples)), phi_(phi) {
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (!index_.emplace(entities_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::IntegrityError, "duplicate entity " + entities_[i].label());
    }
  }
  const int n = static_cast<int>(entities_.size());
  for (const auto& t : triples_) {
    if (t.head < 0 || t.head >= n || t.tail < 0 || t.tail >= n) {
      throw Error(ErrorCode::IntegrityError, "triple references a missing entity");
    }
  }
}

int JointGraph::find(const Entity& e) const {
  auto it = index_.find(e);
  return it == index_.end() ? -1 : it->second;
}

std::size_t JointGraph::count(Relation r) const {
  return static_cast<std::size_t>(std::count_if(
      triples_.begin(), triples_.end(), [r](const Triple& t) { return t.relation == r; }));
}

double mutual_information(long n_both, long n1, long n2, long n_events) {
  if (n1 < 1 || n2 < 1 || n_both < 0 || n_both > n1 || n_both > n2 ||
      n_events < std::max(n1, n2)) {
    throw Error(ErrorCode::DomainError,
                "mutual_information(" + std::to_string(n_both) + ", " + std::to_string(n1) +
                    ", " + std::to_string(n2) + ", " + std::to_string(n_events) + ")");
  }
  if (n_both == 0) return kNegInf;
  return std::log(static_cast<double>(n_both) * static_cast<double>(n_events) /
                  (static_cast<double>(n1) * static_cast<double>(n2)));
}

namespace {

struct LabeledTriple {
  Entity head;
  Relation relation;
  Entity tail;
};

void add_domain_relations(const Corpus& corpus, double phi, std::vector<LabeledTriple>& out) {
  const Domain d = corpus.domain();
  const auto& vocab = corpus.vocab();

  // Participation: user -> every word of every event the user joined.
  std::set<std::pair<std::string, std::string>> participation;
  for (const auto& e : corpus.events()) {
    std::set<std::string> words(e.tokens.begin(), e.tokens.end());
    for (const auto& u : e.participants) {
      for (const auto& w : words) participation.emplace(u, w);
    }
  }
  for (const auto& [u, w] : participation) {
    out.push_back({{EntityKind::User, d, u}, Relation::Participation, {EntityKind::Word, d, w}});
  }

  // Co-occurrence, counted once per event regardless of token repetition.
  std::map<std::pair<std::string, std::string>, long> pair_counts;
  for (const auto& e : corpus.events()) {
    std::set<std::string> words(e.tokens.begin(), e.tokens.end());
    for (auto i = words.begin(); i != words.end(); ++i) {
      for (auto j = std::next(i); j != words.end(); ++j) ++pair_counts[{*i, *j}];
    }
  }
  const long n_events = static_cast<long>(corpus.events().size());
  for (const auto& [pair, n_both] : pair_counts) {
    double mi = mutual_information(n_both, vocab.count(pair.first), vocab.count(pair.second),
                                   n_events);
    if (mi > phi) {
      out.push_back({{EntityKind::Word, d, pair.first},
                     Relation::CoOccurrence,
                     {EntityKind::Word, d, pair.second}});
    }
  }
}

JointGraph assemble(std::vector<LabeledTriple> labeled, double phi) {
  std::set<Entity> entity_set;
  for (const auto& t : labeled) {
    entity_set.insert(t.head);
    entity_set.insert(t.tail);
  }
  std::vector<Entity> entities(entity_set.begin(), entity_set.end());
  std::map<Entity, int> index;
  for (std::size_t i = 0; i < entities.size(); ++i) index[entities[i]] = static_cast<int>(i);

  std::vector<Triple> triples;
  triples.reserve(labeled.size());
  for (const auto& t : labeled) triples.push_back({index[t.head], t.relation, index[t.tail]});
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return JointGraph(std::move(entities), std::move(triples), phi);
}

}  // namespace

JointGraph build_joint_graph(const Corpus& target, const Corpus& social, double phi) {
  if (target.empty() || social.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "joint graph needs events in both domains");
  }
  if (target.domain() != Domain::Target || social.domain() != Domain::Social) {
    throw Error(ErrorCode::IntegrityError, "build_joint_graph expects (target, social) corpora");
  }
  std::vector<LabeledTriple> labeled;
  add_domain_relations(target, phi, labeled);
  add_domain_relations(social, phi, labeled);
  for (const auto& [w, n] : target.vocab().counts) {
    if (social.vocab().contains(w)) {
      labeled.push_back({{EntityKind::Word, Domain::Target, w},
                         Relation::SameWord,
                         {EntityKind::Word, Domain::Social, w}});
    }
  }
  return assemble(std::move(labeled), phi);
}

JointGraph build_single_domain_graph(const Corpus& corpus, double phi) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "graph needs at least one event");
  std::vector<LabeledTriple> labeled;
  add_domain_relations(corpus, phi, labeled);
  return assemble(std::move(labeled), phi);
}

void write_graph_tsv(const std::filesystem::path& path, const JointGraph& g) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "# phi=" << format_double(g.phi()) << '\n';
  std::vector<std::string> lines;
  lines.reserve(g.triples().size());
  for (const auto& t : g.triples()) {
    lines.push_back(g.entities()[t.head].label() + "\t" + std::string(relation_name(t.relation)) +
                    "\t" + g.entities()[t.tail].label());
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) out << l << '\n';
}

JointGraph read_graph_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  double phi = kDefaultPhi;
  std::vector<LabeledTriple> labeled;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# phi=", 0) == 0) {
      phi = std::strtod(line.c_str() + 6, nullptr);
      continue;
    }
    if (line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    labeled.push_back({Entity::parse(line.substr(0, t1)),
                       parse_relation(line.substr(t1 + 1, t2 - t1 - 1)),
                       Entity::parse(line.substr(t2 + 1))});
  }
  return assemble(std::move(labeled), phi);
}

}  // namespace evpart
