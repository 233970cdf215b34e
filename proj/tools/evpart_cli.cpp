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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "evpart/pipeline.hpp"

namespace {

const char* outcome_name(evpart::StageOutcome o) {
  switch (o) {
    case evpart::StageOutcome::Ran: return "done";
    case evpart::StageOutcome::UpToDate: return "up-to-date";
    case evpart::StageOutcome::Skipped: return "skipped";
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evpart: event participation prediction pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;

  for (const char* name : {"synth", "build-graph", "train-kge", "fit-map", "train", "evaluate",
                           "pipeline"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_flag("--force", force, "rerun even when outputs are up to date");
    sub->add_option("--seed", seed, "override the global seed");
    sub->add_option("--method", method, "override the method (base, bgf, mix, proposed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    evpart::PipelineConfig cfg = evpart::load_pipeline_config(config_path);
    if (seed) cfg.seed = *seed;
    if (method) cfg.method = evpart::parse_method(*method);
    for (const auto& r : evpart::run_stage(subcommand, cfg, {force})) {
      std::cout << r.stage << '\t' << outcome_name(r.outcome) << '\n';
    }
  } catch (const evpart::Error& e) {
    const auto cls = evpart::classify(e.code());
    std::cerr << "evpart: " << evpart::failure_name(cls) << ": " << e.what() << '\n';
    return evpart::exit_code(cls);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "evpart: io error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "evpart: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
