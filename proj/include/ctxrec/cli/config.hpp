// Copyright 2026 The ctxrec Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctxrec/data/dataset.hpp"
#include "ctxrec/data/synth.hpp"
#include "ctxrec/eval/pipeline.hpp"
#include "json.hpp"

namespace ctxrec::cli {

struct DataSection {
  enum class Source { kSynth, kCsv };
  Source source = Source::kSynth;
  std::string path;         // csv only
  std::string schema_path;  // required for csv, optional for synth
  char delimiter = ',';
  /// Generator settings; `schema` is filled from schema_path or the built-in default.
  data::SynthConfig synth;
};

struct RunConfig {
  DataSection data;
  eval::PipelineConfig pipeline;
  std::vector<std::size_t> sweep_lengths = {2, 3, 4, 5, 6};
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = "out";
};

/// Parses a run config. Unknown keys and inconsistent settings throw
/// InvalidConfig. Relative paths are resolved against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

/// Normalized form with every default spelled out. Parsing it again yields
/// the same config.
nlohmann::json run_config_to_json(const RunConfig& config);

nn::TrainingConfig parse_training(const nlohmann::json& section,
                                  const nn::TrainingConfig& defaults = {});
nlohmann::json training_to_json(const nn::TrainingConfig& config);

/// Resolves the dataset described by the data section.
data::Dataset load_dataset(const RunConfig& config);
data::SchemaDocument load_schema_document(const RunConfig& config);

/// Cache keys for stage outputs: each covers its own section and every
/// upstream section it depends on.
struct StageKeys {
  std::string encoder;
  std::string recommender;
  std::string eval;
};
StageKeys stage_keys(const RunConfig& config, std::uint64_t seed);

}  // namespace ctxrec::cli
