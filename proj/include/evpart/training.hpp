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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "evpart/features.hpp"

namespace evpart {

inline constexpr double kProbEpsilon = 1e-7;

struct TrainConfig {
  double learning_rate = 0.005;
  int epochs = 100;
  int batch_size = 256;
  int negatives_per_positive = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochLoss {
  double partp = 0.0;
  double kd = 0.0;
};

inline double clamp_prob(double p, double eps = kProbEpsilon) {
  return std::clamp(p, eps, 1.0 - eps);
}

// L_PartP: summed binary cross-entropy (positive sign), predictions clamped.
double partp_loss(std::span<const double> probs, std::span<const double> labels);
// L_KD: summed point-wise Bernoulli KL(p_new || p_old), both clamped.
double kd_loss(std::span<const double> p_new, std::span<const double> p_old);

// Per-point losses and their derivatives w.r.t. the model logit.
double partp_point(double prob, double label);
double partp_dlogit(double prob, double label);
double kd_point(double p_new, double p_old);
double kd_dlogit(double p_new, double p_old);

// Every (user, event) participation of a corpus, as namespaced keys.
std::vector<std::pair<std::string, std::string>> interactions_of(const Corpus& corpus);

// Keeps every positive and adds `ratio` distinct non-participants per positive,
// drawn uniformly from `users`.
std::vector<LabeledPair> sample_negatives(
    const std::vector<std::pair<std::string, std::string>>& interactions,
    const std::vector<std::string>& users, int ratio, Rng& rng);

Vector sigmoid(const Matrix& logits);

// Loss (L_PartP + kd_weight * L_KD) and its parameter gradient on one batch.
// teacher_probs may be empty when kd_weight is zero.
template <class Model>
std::pair<EpochLoss, typename Model::Params> loss_and_gradient(
    const Model& model, const BatchInputs& in, std::span<const double> labels,
    std::span<const double> teacher_probs, double kd_weight) {
  typename Model::Cache cache;
  const Vector probs = sigmoid(model.logits(in, &cache));
  Matrix dlogits(1, in.size());
  EpochLoss loss;
  for (Eigen::Index j = 0; j < in.size(); ++j) {
    loss.partp += partp_point(probs[j], labels[j]);
    dlogits(0, j) = partp_dlogit(probs[j], labels[j]);
    if (!teacher_probs.empty()) {
      loss.kd += kd_point(probs[j], teacher_probs[j]);
      dlogits(0, j) += kd_weight * kd_dlogit(probs[j], teacher_probs[j]);
    }
  }
  auto grad = zeros_like(model.params);
  model.backward(in, cache, dlogits, grad);
  return {loss, std::move(grad)};
}

// Mini-batch SGD on L_PartP (+ kd_weight * L_KD against a frozen teacher).
// Per-pair losses are summed in pair order so the trace does not depend on
// the shuffle.
template <class Model>
std::vector<EpochLoss> train_model(Model& model, const std::vector<IndexedPair>& pairs,
                                   const UserFeatures& users, const EventFeatures& events,
                                   const TrainConfig& cfg, const Model* teacher = nullptr,
                                   double kd_weight = 0.0) {
  cfg.validate();
  if (pairs.empty()) throw Error(ErrorCode::EmptyDataset, "no training pairs");
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> partp(pairs.size()), kd(pairs.size());
  std::vector<EpochLoss> trace;
  trace.reserve(cfg.epochs);
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      BatchInputs in = gather(pairs, idx, users, events);

      typename Model::Cache cache;
      const Vector probs = sigmoid(model.logits(in, &cache));
      Vector old;
      if (teacher) old = sigmoid(teacher->logits(in, nullptr));
      Matrix dlogits(1, in.size());
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const double y = pairs[idx[j]].label;
        partp[idx[j]] = partp_point(probs[j], y);
        double d = partp_dlogit(probs[j], y);
        if (teacher) {
          kd[idx[j]] = kd_point(probs[j], old[j]);
          d += kd_weight * kd_dlogit(probs[j], old[j]);
        }
        dlogits(0, static_cast<Eigen::Index>(j)) = d;
      }
      auto grad = zeros_like(model.params);
      model.backward(in, cache, dlogits, grad);
      sgd_step(model.params, grad, cfg.learning_rate);
    }
    EpochLoss e;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      e.partp += partp[i];
      e.kd += kd[i];
    }
    trace.push_back(e);
  }
  return trace;
}

template <class Model>
Vector predict(const Model& model, const BatchInputs& in) {
  return sigmoid(model.logits(in, nullptr));
}

}  // namespace evpart
