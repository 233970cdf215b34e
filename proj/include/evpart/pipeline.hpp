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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evpart/embed_map.hpp"
#include "evpart/eval.hpp"
#include "evpart/kd_trainer.hpp"
#include "evpart/synthgen.hpp"
#include "evpart/transe.hpp"

namespace evpart {

enum class Method { Base, Bgf, Mix, Proposed };

std::string_view method_name(Method m);
Method parse_method(std::string_view s);

struct DataPaths {
  std::filesystem::path target_events;
  std::filesystem::path target_users;
  std::filesystem::path social_events;
  std::filesystem::path social_users;
  std::filesystem::path cold_events;
  std::filesystem::path base_embeddings;
  std::filesystem::path word_vectors;

  // Standard file names under one directory (the layout `synth` writes).
  static DataPaths in_dir(const std::filesystem::path& dir);
};

struct ModelConfig {
  int latent = 200;
  std::vector<int> mlp_widths{256, 128, 64};
  bool attention = true;
  bool neumf_teacher = false;  // Proposed/MIX on a graph-space NeuMF instead of BGF
};

struct PipelineConfig {
  Method method = Method::Proposed;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "run";
  DataPaths data;
  std::optional<SynthConfig> synth;  // when set, `synth` writes the data files
  double phi = kDefaultPhi;
  TranseConfig transe;
  MappingConfig mapping;
  ModelConfig model;
  TrainConfig train;
  TrainConfig teacher_train;
  double kd_weight = 1.0;
  bool kd_warm_start = true;
  SplitSpec split;

  bool uses_social() const { return method == Method::Mix || method == Method::Proposed; }
  bool uses_graph() const { return method != Method::Base; }
};

// Parses the JSON config; unknown keys are rejected.
PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Artifact names inside out_dir.
struct Artifacts {
  static constexpr const char* kGraph = "graph.tsv";
  static constexpr const char* kGraphEmbeddings = "graph_embeddings.txt";
  static constexpr const char* kTranseLoss = "transe_loss.csv";
  static constexpr const char* kTransfer = "transfer_matrix.txt";
  static constexpr const char* kSynthBase = "synth_base_embeddings.txt";
  static constexpr const char* kModel = "model.ckpt";
  static constexpr const char* kTeacher = "teacher.ckpt";
  static constexpr const char* kLossTrace = "loss_trace.csv";
  static constexpr const char* kTeacherTrace = "teacher_loss_trace.csv";
  static constexpr const char* kReport = "report.json";
  static constexpr const char* kSummary = "summary.tsv";
  static constexpr const char* kManifest = "manifest.tsv";
};

enum class StageOutcome { Ran, UpToDate, Skipped };

struct StageResult {
  std::string stage;
  StageOutcome outcome = StageOutcome::Ran;
};

struct RunOptions {
  bool force = false;
};

// Runs one subcommand: synth, build-graph, train-kge, fit-map, train,
// evaluate, or pipeline (all stages in order).
std::vector<StageResult> run_stage(const std::string& subcommand, const PipelineConfig& cfg,
                                   const RunOptions& opts = {});

// Failure class used for CLI exit codes and diagnostics.
enum class FailureClass { Config, Io, Integrity, Numeric };
FailureClass classify(ErrorCode code);
int exit_code(FailureClass c);
std::string_view failure_name(FailureClass c);

// Deterministic 64-bit FNV-1a, used for manifest input hashes.
std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 14695981039346656037ULL);

}  // namespace evpart
