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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evpart/types.hpp"

namespace evpart {

struct EventRecord {
  std::string id;
  Domain domain = Domain::Target;
  std::string text;
  std::vector<std::string> tokens;        // d(e), derived from text
  std::vector<std::string> participants;  // p(e), sorted and unique, raw user ids
};

struct UserRecord {
  std::string id;
  Domain domain = Domain::Target;

  std::string key() const { return user_key(domain, id); }
};

// Event frequency N(w) for each word of one domain.
struct Vocabulary {
  Domain domain = Domain::Target;
  std::map<std::string, int> counts;

  bool contains(const std::string& w) const { return counts.count(w) != 0; }
  int count(const std::string& w) const;
};

struct WordVectorTable {
  int dim = 0;
  std::unordered_map<std::string, Vector> vectors;

  const Vector* find(const std::string& word) const;
};

// l^B(u) keyed by raw target-domain user id.
struct BaseEmbeddingTable {
  int dim = 0;
  std::map<std::string, Vector> vectors;

  const Vector* find(const std::string& user_id) const;
};

// One domain's events and users. Immutable once built.
class Corpus {
 public:
  Corpus() = default;

  // Validates every invariant; throws IntegrityError on dangling or duplicate ids.
  static Corpus build(Domain domain, std::vector<EventRecord> events,
                      std::vector<UserRecord> users, BaseEmbeddingTable base = {});

  Domain domain() const { return domain_; }
  const std::vector<EventRecord>& events() const { return events_; }
  const std::vector<UserRecord>& users() const { return users_; }
  const Vocabulary& vocab() const { return vocab_; }
  const BaseEmbeddingTable& base() const { return base_; }

  const EventRecord* find_event(const std::string& id) const;
  bool has_user(const std::string& id) const { return user_index_.count(id) != 0; }
  bool empty() const { return events_.empty(); }

  // Same users and base table, different events (used by the split operations).
  Corpus with_events(std::vector<EventRecord> events) const;

 private:
  Domain domain_ = Domain::Target;
  std::vector<EventRecord> events_;
  std::vector<UserRecord> users_;
  Vocabulary vocab_;
  BaseEmbeddingTable base_;
  std::unordered_map<std::string, std::size_t> event_index_;
  std::unordered_map<std::string, std::size_t> user_index_;
};

// Lowercase, split on non-alphanumeric runs, drop tokens shorter than two
// characters. Bytes >= 0x80 are kept as word characters so UTF-8 words survive.
std::vector<std::string> tokenize(std::string_view text);

// r(e): mean of the vectors of in-vocabulary tokens (duplicates weigh in).
Vector embed_event(const EventRecord& e, const WordVectorTable& table);

EventRecord make_event(std::string id, Domain domain, std::string text,
                       std::vector<std::string> participants);

struct LoadedCorpus {
  Corpus corpus;
  WordVectorTable words;
};

LoadedCorpus load_corpus(Domain domain, const std::filesystem::path& events_path,
                         const std::filesystem::path& users_path,
                         const std::optional<std::filesystem::path>& base_embed_path,
                         const std::filesystem::path& word_vec_path);

std::vector<EventRecord> read_events(const std::filesystem::path& path);
std::vector<UserRecord> read_users(const std::filesystem::path& path);
WordVectorTable read_word_vectors(const std::filesystem::path& path);
BaseEmbeddingTable read_base_embeddings(const std::filesystem::path& path);

void write_events(const std::filesystem::path& path, const std::vector<EventRecord>& events);
void write_users(const std::filesystem::path& path, const std::vector<UserRecord>& users);
void write_word_vectors(const std::filesystem::path& path, const WordVectorTable& table);
void write_base_embeddings(const std::filesystem::path& path, const BaseEmbeddingTable& table);

}  // namespace evpart
