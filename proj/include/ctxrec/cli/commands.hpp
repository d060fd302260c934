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
#include <iosfwd>
#include <string>
#include <vector>

#include "ctxrec/cli/config.hpp"
#include "ctxrec/common/errors.hpp"
#include "ctxrec/eval/pipeline.hpp"

namespace ctxrec::cli {

/// Environment variable that overrides the output directory (and nothing else).
inline constexpr const char* kOutputDirEnv = "CTXREC_OUTPUT_DIR";

int exit_code_for(ErrorKind kind);

/// Output layout under config.output_dir:
///   config.json                         normalized config of the last command
///   data/interactions.csv, schema.json  from `synth`
///   stages/<stage>-<key>/...            content-addressed stage outputs
///   report.json, report.csv             from `eval`, one entry per seed
///   sweep.csv                           from `sweep`
struct StagePaths {
  std::string encoder_model;
  std::string encoder_trace;
  std::string contexts;
  std::string bundle;
  std::string rec_trace;
  std::string report_json;
  std::string report_csv;
};
StagePaths stage_paths(const RunConfig& config, std::uint64_t seed);

void write_config_copy(const RunConfig& config);

/// Writes data/interactions.csv and data/schema.json. Returns the row count.
std::size_t cmd_synth(const RunConfig& config, std::ostream& log);
/// Stage commands reuse an existing output with the same key.
std::string cmd_train_encoder(const RunConfig& config, std::uint64_t seed, std::ostream& log);
std::string cmd_extract(const RunConfig& config, std::uint64_t seed, std::ostream& log);
std::string cmd_train_rec(const RunConfig& config, std::uint64_t seed, std::ostream& log);
eval::EvalReport cmd_eval(const RunConfig& config, std::uint64_t seed, std::ostream& log);
/// Evaluates every seed and writes report.json / report.csv.
std::vector<eval::EvalReport> cmd_eval_all(const RunConfig& config, std::ostream& log);
/// Every seed x sweep length; writes sweep.csv.
std::vector<eval::SweepRow> cmd_sweep(const RunConfig& config, std::ostream& log);
/// Reads user_id,item_id,<context columns> (timestamp and rating optional)
/// and writes user_id,item_id,prediction. Returns the row count.
std::size_t cmd_predict(const RunConfig& config, std::uint64_t seed, const std::string& input,
                        const std::string& output, std::ostream& log);

/// Full command-line entry point. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctxrec::cli
