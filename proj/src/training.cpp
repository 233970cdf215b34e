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

#include "evpart/training.hpp"

#include <cmath>
#include <map>
#include <set>

namespace evpart {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw Error(ErrorCode::ConfigError, "learning_rate must be >= 0");
  if (epochs < 1) throw Error(ErrorCode::ConfigError, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::ConfigError, "batch_size must be >= 1");
  if (negatives_per_positive < 0) {
    throw Error(ErrorCode::ConfigError, "negatives_per_positive must be >= 0");
  }
}

double partp_point(double prob, double label) {
  const double p = clamp_prob(prob);
  return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
}

double partp_dlogit(double prob, double label) {
  if (prob < kProbEpsilon || prob > 1.0 - kProbEpsilon) return 0.0;  // clamp is flat there
  return prob - label;
}

double kd_point(double p_new, double p_old) {
  const double pn = clamp_prob(p_new);
  const double po = clamp_prob(p_old);
  return pn * std::log(pn / po) + (1.0 - pn) * std::log((1.0 - pn) / (1.0 - po));
}

double kd_dlogit(double p_new, double p_old) {
  if (p_new < kProbEpsilon || p_new > 1.0 - kProbEpsilon) return 0.0;
  const double po = clamp_prob(p_old);
  // dKL/dp_new = logit(p_new) - logit(p_old); dp_new/dlogit = p_new (1 - p_new)
  const double dkl = std::log(p_new / (1.0 - p_new)) - std::log(po / (1.0 - po));
  return dkl * p_new * (1.0 - p_new);
}

double partp_loss(std::span<const double> probs, std::span<const double> labels) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "partp_loss: probs vs labels");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) s += partp_point(probs[i], labels[i]);
  return s;
}

double kd_loss(std::span<const double> p_new, std::span<const double> p_old) {
  if (p_new.size() != p_old.size()) {
    throw Error(ErrorCode::LengthMismatch, "kd_loss: " + std::to_string(p_new.size()) + " vs " +
                                               std::to_string(p_old.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p_new.size(); ++i) s += kd_point(p_new[i], p_old[i]);
  return s;
}

Vector sigmoid(const Matrix& logits) {
  Vector out(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) out[i] = sigmoid(logits(i));
  return out;
}

std::vector<std::pair<std::string, std::string>> interactions_of(const Corpus& corpus) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : corpus.events()) {
    for (const auto& u : e.participants) out.emplace_back(user_key(e.domain, u), event_key(e));
  }
  return out;
}

std::vector<LabeledPair> sample_negatives(
    const std::vector<std::pair<std::string, std::string>>& interactions,
    const std::vector<std::string>& users, int ratio, Rng& rng) {
  if (ratio < 0) throw Error(ErrorCode::ConfigError, "negative ratio must be >= 0");
  std::map<std::string, std::set<std::string>> participants;
  for (const auto& [u, e] : interactions) participants[e].insert(u);

  std::vector<std::string> pool(users.begin(), users.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  // Non-participant list per event, built lazily.
  std::map<std::string, std::vector<std::string>> outsiders;
  auto outsiders_of = [&](const std::string& e) -> const std::vector<std::string>& {
    auto it = outsiders.find(e);
    if (it != outsiders.end()) return it->second;
    std::vector<std::string> v;
    const auto& in = participants[e];
    for (const auto& u : pool) {
      if (!in.count(u)) v.push_back(u);
    }
    if (static_cast<int>(v.size()) < ratio) {
      throw Error(ErrorCode::InsufficientUsers, "event " + e + " has " +
                                                    std::to_string(v.size()) +
                                                    " non-participants, need " +
                                                    std::to_string(ratio));
    }
    return outsiders.emplace(e, std::move(v)).first->second;
  };

  std::vector<LabeledPair> out;
  out.reserve(interactions.size() * static_cast<std::size_t>(ratio + 1));
  std::vector<std::size_t> picked;
  for (const auto& [u, e] : interactions) {
    out.push_back({u, e, 1});
    if (ratio == 0) continue;
    const auto& cand = outsiders_of(e);
    std::uniform_int_distribution<std::size_t> dist(0, cand.size() - 1);
    picked.clear();
    while (static_cast<int>(picked.size()) < ratio) {
      std::size_t i = dist(rng);
      if (std::find(picked.begin(), picked.end(), i) == picked.end()) picked.push_back(i);
    }
    for (std::size_t i : picked) out.push_back({cand[i], e, 0});
  }
  return out;
}

}  // namespace evpart
