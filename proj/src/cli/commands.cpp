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

#include "ctxrec/cli/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ctxrec/common/hash.hpp"
#include "ctxrec/data/schema.hpp"
#include "ctxrec/nn/model_file.hpp"

namespace ctxrec::cli {
namespace {

namespace fs = std::filesystem;

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
  }
}

// Writes to a temporary sibling, then renames into place.
template <typename Fn>
void write_atomically(const std::string& path, Fn&& write) {
  ensure_parent(path);
  const std::string tmp = path + ".partial";
  write(tmp);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  write_atomically(path, [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + tmp + "'");
  });
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trace_csv(const nn::TrainingTrace& trace) {
  std::string s = "epoch,loss\n";
  for (std::size_t e = 0; e < trace.epoch_loss.size(); ++e) {
    s += std::to_string(e + 1) + "," + format_real(trace.epoch_loss[e]) + "\n";
  }
  return s;
}

bool uses_encoder(rec::ContextMode mode) {
  return mode == rec::ContextMode::kLatentCurrent || mode == rec::ContextMode::kLatentSequential;
}

struct Split {
  data::Dataset train;
  data::Dataset test;
};

Split split_dataset(const RunConfig& config) {
  const auto ds = load_dataset(config);
  auto [train, test] = data::time_split(ds, config.pipeline.train_fraction);
  return {std::move(train), std::move(test)};
}

struct Encoders {
  std::optional<encoders::AutoEncoder> autoencoder;
  std::optional<encoders::LstmEncoderDecoder> sequence;
  std::string digest;

  rec::ContextSource source(const eval::PipelineConfig& config) const {
    return eval::make_context_source(config, autoencoder ? &*autoencoder : nullptr,
                                     sequence ? &*sequence : nullptr);
  }
};

Encoders obtain_encoders(const RunConfig& config, std::uint64_t seed, std::ostream& log) {
  Encoders e;
  if (!uses_encoder(config.pipeline.mode)) return e;
  const std::string path = cmd_train_encoder(config, seed, log);
  if (config.pipeline.mode == rec::ContextMode::kLatentCurrent) {
    e.autoencoder = encoders::AutoEncoder::load(path);
  } else {
    e.sequence = encoders::LstmEncoderDecoder::load(path);
  }
  e.digest = nn::file_digest(path);
  return e;
}

bool cached(const std::string& path, const std::string& what, std::ostream& log) {
  if (!fs::exists(path)) return false;
  log << what << ": cached " << path << "\n";
  return true;
}

std::string output_root(const RunConfig& config) { return config.output_dir; }

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kTraining:
      return 3;
    case ErrorKind::kData:
    case ErrorKind::kModel:
      return 4;
    case ErrorKind::kInternal:
      break;
  }
  return 1;
}

StagePaths stage_paths(const RunConfig& config, std::uint64_t seed) {
  const auto keys = stage_keys(config, seed);
  const fs::path stages = fs::path(output_root(config)) / "stages";
  const fs::path enc = stages / ("encoder-" + keys.encoder);
  const fs::path rec = stages / ("rec-" + keys.recommender);
  const fs::path ev = stages / ("eval-" + keys.eval);
  return {(enc / "encoder.model").string(), (enc / "loss.csv").string(),
          (rec / "contexts.csv").string(),  (rec / "bundle.model").string(),
          (rec / "loss.csv").string(),      (ev / "report.json").string(),
          (ev / "report.csv").string()};
}

void write_config_copy(const RunConfig& config) {
  write_text((fs::path(output_root(config)) / "config.json").string(),
             run_config_to_json(config).dump(2) + "\n");
}

std::size_t cmd_synth(const RunConfig& config, std::ostream& log) {
  if (config.data.source != DataSection::Source::kSynth) {
    throw InvalidConfig("synth: data.source is not 'synth'");
  }
  const auto ds = load_dataset(config);
  const auto dir = fs::path(output_root(config)) / "data";
  const std::string csv = (dir / "interactions.csv").string();
  const std::string schema = (dir / "schema.json").string();
  write_atomically(csv, [&](const std::string& tmp) { data::save_interactions(tmp, ds); });
  write_atomically(schema, [&](const std::string& tmp) {
    data::save_schema(tmp, {ds.schema(), ds.rating_scale()});
  });
  log << "synth: " << ds.size() << " interactions -> " << csv << "\n";
  return ds.size();
}

std::string cmd_train_encoder(const RunConfig& config, std::uint64_t seed, std::ostream& log) {
  if (!uses_encoder(config.pipeline.mode)) {
    throw InvalidConfig("train-encoder: mode '" +
                        std::string(rec::context_mode_name(config.pipeline.mode)) +
                        "' uses no encoder");
  }
  const auto paths = stage_paths(config, seed);
  if (cached(paths.encoder_model, "train-encoder", log)) return paths.encoder_model;
  const auto split = split_dataset(config);
  eval::PipelineResult result;
  eval::train_encoders(split.train, config.pipeline, seed, result);
  write_atomically(paths.encoder_model, [&](const std::string& tmp) {
    if (result.autoencoder) {
      result.autoencoder->save(tmp);
    } else {
      result.sequence_encoder->save(tmp);
    }
  });
  write_text(paths.encoder_trace, trace_csv(result.encoder_result->trace));
  log << "train-encoder: final loss " << format_real(result.encoder_result->final_loss) << " -> "
      << paths.encoder_model << "\n";
  return paths.encoder_model;
}

std::string cmd_extract(const RunConfig& config, std::uint64_t seed, std::ostream& log) {
  const auto paths = stage_paths(config, seed);
  if (cached(paths.contexts, "extract", log)) return paths.contexts;
  const auto ds = load_dataset(config);
  const auto enc = obtain_encoders(config, seed, log);
  const auto contexts = rec::assemble_contexts(ds, enc.source(config.pipeline));
  std::ostringstream out;
  const std::size_t width = contexts.empty() ? 0 : contexts.front().size();
  out << "timestamp,user_id,item_id";
  for (std::size_t k = 0; k < width; ++k) out << ",z" << k;
  out << "\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds[i].timestamp << "," << ds[i].user_id << "," << ds[i].item_id;
    for (double v : contexts[i]) out << "," << format_real(v);
    out << "\n";
  }
  write_text(paths.contexts, out.str());
  log << "extract: " << ds.size() << " context vectors of width " << width << " -> "
      << paths.contexts << "\n";
  return paths.contexts;
}

std::string cmd_train_rec(const RunConfig& config, std::uint64_t seed, std::ostream& log) {
  const auto paths = stage_paths(config, seed);
  if (cached(paths.bundle, "train-rec", log)) return paths.bundle;
  const auto split = split_dataset(config);
  const auto enc = obtain_encoders(config, seed, log);
  nn::TrainingTrace trace;
  const auto model =
      eval::train_recommender(split.train, enc.source(config.pipeline), config.pipeline, seed,
                              &trace);
  rec::BundleInfo info;
  info.schema_fingerprint = split.train.schema().fingerprint();
  info.encoder_digest = enc.digest;
  info.explicit_dims = config.pipeline.explicit_dims;
  info.sequence_length =
      config.pipeline.mode == rec::ContextMode::kLatentSequential ? config.pipeline.encoder.sequence_length : 0;
  write_atomically(paths.bundle,
                   [&](const std::string& tmp) { rec::save_bundle(tmp, model, info); });
  write_text(paths.rec_trace, trace_csv(trace));
  log << "train-rec: final loss "
      << format_real(trace.epoch_loss.empty() ? 0.0 : trace.epoch_loss.back()) << " -> "
      << paths.bundle << "\n";
  return paths.bundle;
}

eval::EvalReport cmd_eval(const RunConfig& config, std::uint64_t seed, std::ostream& log) {
  const auto paths = stage_paths(config, seed);
  const std::string bundle = cmd_train_rec(config, seed, log);
  const auto split = split_dataset(config);
  const auto enc = obtain_encoders(config, seed, log);
  rec::BundleInfo info;
  const auto model = rec::load_bundle(bundle, &info);
  if (info.encoder_digest != enc.digest) {
    throw EncoderSchemaMismatch("bundle " + bundle + " was trained with a different encoder");
  }
  const auto report = eval::evaluate_split(model, split.train, split.test,
                                           enc.source(config.pipeline), config.pipeline, seed);
  write_text(paths.report_json, report.to_json().dump(2) + "\n");
  write_text(paths.report_csv, report.csv_header() + "\n" + report.csv_row() + "\n");
  log << "eval[seed " << seed << "]: rmse " << format_real(report.rmse) << " mae "
      << format_real(report.mae) << "\n";
  return report;
}

std::vector<eval::EvalReport> cmd_eval_all(const RunConfig& config, std::ostream& log) {
  std::vector<eval::EvalReport> reports;
  nlohmann::json all = nlohmann::json::array();
  std::string csv;
  for (auto seed : config.seeds) {
    reports.push_back(cmd_eval(config, seed, log));
    auto j = reports.back().to_json();
    j["seed"] = seed;
    all.push_back(j);
    if (csv.empty()) csv = "seed," + reports.back().csv_header() + "\n";
    csv += std::to_string(seed) + "," + reports.back().csv_row() + "\n";
  }
  const fs::path root(output_root(config));
  write_text((root / "report.json").string(), all.dump(2) + "\n");
  write_text((root / "report.csv").string(), csv);
  return reports;
}

std::vector<eval::SweepRow> cmd_sweep(const RunConfig& config, std::ostream& log) {
  std::vector<eval::SweepRow> rows;
  for (auto seed : config.seeds) {
    for (auto length : config.sweep_lengths) {
      RunConfig c = config;
      c.pipeline.mode = rec::ContextMode::kLatentSequential;
      c.pipeline.explicit_dims.clear();
      c.pipeline.encoder.sequence_length = length;
      const auto report = cmd_eval(c, seed, log);
      rows.push_back({length, report.rmse, report.mae, seed});
    }
  }
  const std::string path = (fs::path(output_root(config)) / "sweep.csv").string();
  write_text(path, eval::sweep_to_csv(rows));
  log << "sweep: " << rows.size() << " rows -> " << path << "\n";
  return rows;
}

std::size_t cmd_predict(const RunConfig& config, std::uint64_t seed, const std::string& input,
                        const std::string& output, std::ostream& log) {
  const std::string bundle = cmd_train_rec(config, seed, log);
  const auto enc = obtain_encoders(config, seed, log);
  rec::BundleInfo info;
  const auto model = rec::load_bundle(bundle, &info);
  if (info.encoder_digest != enc.digest) {
    throw EncoderSchemaMismatch("bundle " + bundle + " was trained with a different encoder");
  }
  const auto doc = load_schema_document(config);
  if (info.schema_fingerprint != doc.features.fingerprint()) {
    throw SchemaMismatch("prediction schema differs from the one the bundle was trained on");
  }
  data::CsvFormat format;
  format.delimiter = config.data.delimiter;
  format.prediction_input = true;
  const auto requests = data::load_interactions(input, doc, format);
  const auto history = load_dataset(config);
  const auto contexts = rec::assemble_contexts(requests, enc.source(config.pipeline), &history);
  std::ostringstream out;
  out << "user_id,item_id,prediction\n";
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    out << r.user_id << "," << r.item_id << ","
        << format_real(model.predict(r.user_id, r.item_id, contexts[i])) << "\n";
  }
  write_text(output, out.str());
  log << "predict: " << requests.size() << " rows -> " << output << "\n";
  return requests.size();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ctxrec: sequential latent context recommender pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "Run config (JSON)")->required();
  app.add_option("--seed", seed, "Run a single seed instead of the configured list");
  app.add_option("--out", out_dir, "Output directory");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  auto* train_encoder = app.add_subcommand("train-encoder", "Train the context encoder");
  auto* extract = app.add_subcommand("extract", "Write latent contexts for every interaction");
  auto* train_rec = app.add_subcommand("train-rec", "Train the recommender bundle");
  auto* evaluate = app.add_subcommand("eval", "Evaluate on the test split");
  auto* sweep = app.add_subcommand("sweep", "Sequence-length sweep");
  auto* predict = app.add_subcommand("predict", "Score user/item/context rows");
  std::string input;
  std::string output;
  predict->add_option("--input", input, "CSV of user_id,item_id,<context columns>")->required();
  predict->add_option("--output", output, "Prediction CSV")->required();
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = load_run_config(config_path);
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
      config.output_dir = env;
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed) config.seeds = {*seed};
    write_config_copy(config);

    if (synth->parsed()) {
      cmd_synth(config, out);
    } else if (train_encoder->parsed()) {
      for (auto s : config.seeds) cmd_train_encoder(config, s, out);
    } else if (extract->parsed()) {
      for (auto s : config.seeds) cmd_extract(config, s, out);
    } else if (train_rec->parsed()) {
      for (auto s : config.seeds) cmd_train_rec(config, s, out);
    } else if (evaluate->parsed()) {
      cmd_eval_all(config, out);
    } else if (sweep->parsed()) {
      cmd_sweep(config, out);
    } else if (predict->parsed()) {
      cmd_predict(config, config.seeds.front(), input, output, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ctxrec::cli
