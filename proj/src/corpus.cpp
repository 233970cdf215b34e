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

#include "evpart/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

#include "evpart/vector_io.hpp"

namespace evpart {

using nlohmann::json;

int Vocabulary::count(const std::string& w) const {
  auto it = counts.find(w);
  return it == counts.end() ? 0 : it->second;
}

const Vector* WordVectorTable::find(const std::string& word) const {
  auto it = vectors.find(word);
  return it == vectors.end() ? nullptr : &it->second;
}

const Vector* BaseEmbeddingTable::find(const std::string& user_id) const {
  auto it = vectors.find(user_id);
  return it == vectors.end() ? nullptr : &it->second;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t codepoints = 0;
  auto flush = [&] {
    if (codepoints >= 2) out.push_back(cur);
    cur.clear();
    codepoints = 0;
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    bool word_char = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                     (c >= 'A' && c <= 'Z') || c >= 0x80;
    if (!word_char) {
      flush();
      continue;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    cur.push_back(static_cast<char>(c));
    if ((c & 0xC0) != 0x80) ++codepoints;  // continuation bytes don't start a code point
  }
  flush();
  return out;
}

Vector embed_event(const EventRecord& e, const WordVectorTable& table) {
  Vector sum = Vector::Zero(table.dim);
  int known = 0;
  for (const auto& tok : e.tokens) {
    if (const Vector* v = table.find(tok)) {
      sum += *v;
      ++known;
    }
  }
  if (known == 0) {
    throw Error(ErrorCode::NoKnownTokens, "event '" + e.id + "' has no in-vocabulary tokens");
  }
  return sum / static_cast<double>(known);
}

EventRecord make_event(std::string id, Domain domain, std::string text,
                       std::vector<std::string> participants) {
  EventRecord e;
  e.id = std::move(id);
  e.domain = domain;
  e.tokens = tokenize(text);
  e.text = std::move(text);
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()), participants.end());
  e.participants = std::move(participants);
  return e;
}

Corpus Corpus::build(Domain domain, std::vector<EventRecord> events,
                     std::vector<UserRecord> users, BaseEmbeddingTable base) {
  Corpus c;
  c.domain_ = domain;
  c.vocab_.domain = domain;

  for (std::size_t i = 0; i < users.size(); ++i) {
    if (users[i].domain != domain) {
      throw Error(ErrorCode::IntegrityError, "user '" + users[i].id + "' belongs to the " +
                                                 std::string(domain_name(users[i].domain)) +
                                                 " domain");
    }
    if (!c.user_index_.emplace(users[i].id, i).second) {
      throw Error(ErrorCode::IntegrityError, "duplicate user id '" + users[i].id + "'");
    }
  }

  for (std::size_t i = 0; i < events.size(); ++i) {
    auto& e = events[i];
    if (e.domain != domain) {
      throw Error(ErrorCode::IntegrityError, "event '" + e.id + "' belongs to the " +
                                                 std::string(domain_name(e.domain)) + " domain");
    }
    if (!c.event_index_.emplace(e.id, i).second) {
      throw Error(ErrorCode::IntegrityError, "duplicate event id '" + e.id + "'");
    }
    std::sort(e.participants.begin(), e.participants.end());
    e.participants.erase(std::unique(e.participants.begin(), e.participants.end()),
                         e.participants.end());
    if (e.participants.empty()) {
      throw Error(ErrorCode::IntegrityError, "event '" + e.id + "' has no participants");
    }
    for (const auto& p : e.participants) {
      if (!c.user_index_.count(p)) {
        throw Error(ErrorCode::IntegrityError,
                    "event '" + e.id + "' references unknown user '" + p + "'");
      }
    }
    std::set<std::string> distinct(e.tokens.begin(), e.tokens.end());
    for (const auto& w : distinct) ++c.vocab_.counts[w];
  }

  if (base.dim > 0 || !base.vectors.empty()) {
    for (const auto& [id, v] : base.vectors) {
      require_same_dim(v.size(), base.dim, "base embedding");
      if (!c.user_index_.count(id)) {
        throw Error(ErrorCode::IntegrityError, "base embedding for unknown user '" + id + "'");
      }
    }
    for (const auto& u : users) {
      if (!base.vectors.count(u.id)) {
        throw Error(ErrorCode::IntegrityError, "no base embedding for user '" + u.id + "'");
      }
    }
  }

  c.events_ = std::move(events);
  c.users_ = std::move(users);
  c.base_ = std::move(base);
  return c;
}

const EventRecord* Corpus::find_event(const std::string& id) const {
  auto it = event_index_.find(id);
  return it == event_index_.end() ? nullptr : &events_[it->second];
}

Corpus Corpus::with_events(std::vector<EventRecord> events) const {
  return build(domain_, std::move(events), users_, base_);
}

namespace {

template <class F>
void for_each_json_line(const std::filesystem::path& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = [&] { return path.string() + ":" + std::to_string(line_no); };
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& ex) {
      throw Error(ErrorCode::ParseError, where() + ": " + ex.what());
    }
    try {
      f(j);
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::ParseError, where() + ": " + ex.what());
    } catch (const Error& ex) {
      if (ex.code() == ErrorCode::ParseError) {
        throw Error(ErrorCode::ParseError, where() + ": " + ex.what());
      }
      throw;
    }
  }
}

}  // namespace

std::vector<EventRecord> read_events(const std::filesystem::path& path) {
  std::vector<EventRecord> out;
  for_each_json_line(path, [&](const json& j) {
    out.push_back(make_event(j.at("id").get<std::string>(),
                             parse_domain(j.at("domain").get<std::string>()),
                             j.at("text").get<std::string>(),
                             j.at("participants").get<std::vector<std::string>>()));
  });
  return out;
}

std::vector<UserRecord> read_users(const std::filesystem::path& path) {
  std::vector<UserRecord> out;
  for_each_json_line(path, [&](const json& j) {
    out.push_back({j.at("id").get<std::string>(), parse_domain(j.at("domain").get<std::string>())});
  });
  return out;
}

WordVectorTable read_word_vectors(const std::filesystem::path& path) {
  VectorFile f = read_vector_file(path);
  WordVectorTable t;
  t.dim = f.dim;
  for (auto& [k, v] : f.entries) t.vectors[k] = std::move(v);
  return t;
}

BaseEmbeddingTable read_base_embeddings(const std::filesystem::path& path) {
  VectorFile f = read_vector_file(path);
  BaseEmbeddingTable t;
  t.dim = f.dim;
  for (auto& [k, v] : f.entries) {
    if (!t.vectors.emplace(k, std::move(v)).second) {
      throw Error(ErrorCode::IntegrityError, "duplicate base embedding for '" + k + "'");
    }
  }
  return t;
}

LoadedCorpus load_corpus(Domain domain, const std::filesystem::path& events_path,
                         const std::filesystem::path& users_path,
                         const std::optional<std::filesystem::path>& base_embed_path,
                         const std::filesystem::path& word_vec_path) {
  auto users = read_users(users_path);
  auto events = read_events(events_path);
  BaseEmbeddingTable base;
  if (base_embed_path) {
    base = read_base_embeddings(*base_embed_path);
  } else if (domain == Domain::Target) {
    throw Error(ErrorCode::IntegrityError, "target-domain corpus requires base embeddings");
  }
  LoadedCorpus out;
  out.corpus = Corpus::build(domain, std::move(events), std::move(users), std::move(base));
  out.words = read_word_vectors(word_vec_path);
  return out;
}

void write_events(const std::filesystem::path& path, const std::vector<EventRecord>& events) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& e : events) {
    json j = {{"id", e.id},
              {"domain", domain_name(e.domain)},
              {"text", e.text},
              {"participants", e.participants}};
    out << j.dump() << '\n';
  }
}

void write_users(const std::filesystem::path& path, const std::vector<UserRecord>& users) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& u : users) {
    out << json{{"id", u.id}, {"domain", domain_name(u.domain)}}.dump() << '\n';
  }
}

void write_word_vectors(const std::filesystem::path& path, const WordVectorTable& table) {
  VectorFile f;
  f.dim = table.dim;
  for (const auto& [k, v] : table.vectors) f.entries.emplace_back(k, v);
  std::sort(f.entries.begin(), f.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  write_vector_file(path, f);
}

void write_base_embeddings(const std::filesystem::path& path, const BaseEmbeddingTable& table) {
  VectorFile f;
  f.dim = table.dim;
  for (const auto& [k, v] : table.vectors) f.entries.emplace_back(k, v);
  write_vector_file(path, f);
}

}  // namespace evpart
