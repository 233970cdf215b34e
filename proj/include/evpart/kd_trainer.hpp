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

#include <vector>

#include "evpart/training.hpp"

namespace evpart {

struct KdConfig {
  TrainConfig teacher;
  TrainConfig student;
  double kd_weight = 1.0;
  bool warm_start = true;  // student starts from the teacher's weights

  void validate() const;
};

template <class Model>
struct CrossDomainResult {
  Model teacher;
  Model student;
  std::vector<EpochLoss> teacher_trace;
  std::vector<EpochLoss> student_trace;
};

// Phase 1 fits the teacher on social pairs with L_PartP. Phase 2 trains the
// student on target pairs with L_PartP + kd_weight * L_KD, where the KD term
// compares against the frozen teacher on the same mini-batch.
// `fresh` is an untrained model; it becomes the teacher, and also the student
// when warm_start is off.
template <class Model>
CrossDomainResult<Model> train_cross_domain(const std::vector<IndexedPair>& social_pairs,
                                            const std::vector<IndexedPair>& target_pairs,
                                            const UserFeatures& users,
                                            const EventFeatures& events, const KdConfig& cfg,
                                            const Model& fresh) {
  cfg.validate();
  if (social_pairs.empty()) throw Error(ErrorCode::EmptyDataset, "no social training pairs");
  if (target_pairs.empty()) throw Error(ErrorCode::EmptyDataset, "no target training pairs");

  CrossDomainResult<Model> out{fresh, fresh, {}, {}};
  out.teacher_trace = train_model(out.teacher, social_pairs, users, events, cfg.teacher);
  if (cfg.warm_start) out.student = out.teacher;
  const Model frozen = out.teacher;
  out.student_trace = train_model(out.student, target_pairs, users, events, cfg.student, &frozen,
                                  cfg.kd_weight);
  return out;
}

struct MixResult {
  std::size_t dataset_size = 0;
  std::vector<EpochLoss> trace;
};

// Pools both domains into one training set.
template <class Model>
MixResult train_mix(Model& model, const std::vector<IndexedPair>& social_pairs,
                    const std::vector<IndexedPair>& target_pairs, const UserFeatures& users,
                    const EventFeatures& events, const TrainConfig& cfg) {
  std::vector<IndexedPair> pooled;
  pooled.reserve(social_pairs.size() + target_pairs.size());
  pooled.insert(pooled.end(), target_pairs.begin(), target_pairs.end());
  pooled.insert(pooled.end(), social_pairs.begin(), social_pairs.end());
  if (pooled.empty()) throw Error(ErrorCode::EmptyDataset, "no training pairs");
  MixResult r;
  r.dataset_size = pooled.size();
  r.trace = train_model(model, pooled, users, events, cfg);
  return r;
}

}  // namespace evpart
