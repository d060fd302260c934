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

#include "ctxrec/cli/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/hash.hpp"
#include "ctxrec/nn/model_file.hpp"

namespace ctxrec::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidConfig(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (allowed.count(key) == 0) throw InvalidConfig(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidConfig(where + "." + key + ": " + e.what());
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).lexically_normal().string();
}

json synth_to_json(const data::SynthConfig& s) {
  return {{"n_users", s.n_users},
          {"n_items", s.n_items},
          {"n_interactions", s.n_interactions},
          {"signal_horizon", s.signal_horizon},
          {"noise_sd", s.noise_sd},
          {"seed", s.seed},
          {"latent_rank", s.latent_rank},
          {"affinity_sd", s.affinity_sd},
          {"bias_sd", s.bias_sd},
          {"context_effect", s.context_effect},
          {"persistence", s.persistence},
          {"missing_rate", s.missing_rate},
          {"start_time", s.start_time},
          {"mean_gap_seconds", s.mean_gap_seconds}};
}

void parse_synth(const json& obj, data::SynthConfig& s) {
  const std::string w = "data.synth";
  check_keys(obj,
             {"n_users", "n_items", "n_interactions", "signal_horizon", "noise_sd", "seed",
              "latent_rank", "affinity_sd", "bias_sd", "context_effect", "persistence",
              "missing_rate", "start_time", "mean_gap_seconds"},
             w);
  read(obj, "n_users", s.n_users, w);
  read(obj, "n_items", s.n_items, w);
  read(obj, "n_interactions", s.n_interactions, w);
  read(obj, "signal_horizon", s.signal_horizon, w);
  read(obj, "noise_sd", s.noise_sd, w);
  read(obj, "seed", s.seed, w);
  read(obj, "latent_rank", s.latent_rank, w);
  read(obj, "affinity_sd", s.affinity_sd, w);
  read(obj, "bias_sd", s.bias_sd, w);
  read(obj, "context_effect", s.context_effect, w);
  read(obj, "persistence", s.persistence, w);
  read(obj, "missing_rate", s.missing_rate, w);
  read(obj, "start_time", s.start_time, w);
  read(obj, "mean_gap_seconds", s.mean_gap_seconds, w);
  if (s.n_users == 0 || s.n_items == 0 || s.n_interactions == 0) {
    throw InvalidConfig("data.synth: n_users, n_items and n_interactions must be positive");
  }
  if (s.noise_sd < 0.0) throw InvalidConfig("data.synth.noise_sd must be non-negative");
  if (s.persistence < 0.0 || s.persistence > 1.0 || s.missing_rate < 0.0 || s.missing_rate > 1.0) {
    throw InvalidConfig("data.synth: persistence and missing_rate must lie in [0, 1]");
  }
}

std::string key_of(const std::string& text) { return to_hex(fnv1a(text)); }

}  // namespace

nn::TrainingConfig parse_training(const json& section, const nn::TrainingConfig& defaults) {
  nn::TrainingConfig t = defaults;
  const std::string w = "training";
  check_keys(section, {"batch_size", "iterations", "unit", "base_lr", "floor_lr"}, w);
  read(section, "batch_size", t.batch_size, w);
  read(section, "iterations", t.iterations, w);
  read(section, "base_lr", t.base_lr, w);
  read(section, "floor_lr", t.floor_lr, w);
  if (section.contains("unit")) {
    std::string unit;
    read(section, "unit", unit, w);
    t.unit = nn::parse_iteration_unit(unit);
  }
  if (t.batch_size == 0) throw InvalidConfig("training.batch_size must be positive");
  if (t.iterations == 0) throw InvalidConfig("training.iterations must be positive");
  if (!(t.base_lr > 0.0) || !(t.floor_lr > 0.0) || t.floor_lr > t.base_lr) {
    throw InvalidConfig("training: need 0 < floor_lr <= base_lr");
  }
  return t;
}

json training_to_json(const nn::TrainingConfig& t) {
  return {{"batch_size", t.batch_size},
          {"iterations", t.iterations},
          {"unit", std::string(nn::iteration_unit_name(t.unit))},
          {"base_lr", t.base_lr},
          {"floor_lr", t.floor_lr}};
}

RunConfig parse_run_config(const json& doc, const std::string& base_dir) {
  RunConfig c;
  check_keys(doc,
             {"output_dir", "seeds", "data", "split", "encoder", "recommender", "eval", "sweep"},
             "config");
  read(doc, "output_dir", c.output_dir, "config");
  read(doc, "seeds", c.seeds, "config");
  if (c.seeds.empty()) throw InvalidConfig("config.seeds must not be empty");

  if (!doc.contains("data")) throw InvalidConfig("config: missing 'data' section");
  const json& d = doc.at("data");
  check_keys(d, {"source", "path", "schema", "delimiter", "synth"}, "data");
  std::string source = "synth";
  read(d, "source", source, "data");
  if (source == "synth") {
    c.data.source = DataSection::Source::kSynth;
  } else if (source == "csv") {
    c.data.source = DataSection::Source::kCsv;
  } else {
    throw InvalidConfig("data.source must be 'synth' or 'csv', got '" + source + "'");
  }
  read(d, "path", c.data.path, "data");
  read(d, "schema", c.data.schema_path, "data");
  c.data.path = resolve(base_dir, c.data.path);
  c.data.schema_path = resolve(base_dir, c.data.schema_path);
  std::string delimiter = ",";
  read(d, "delimiter", delimiter, "data");
  if (delimiter.size() != 1) throw InvalidConfig("data.delimiter must be a single character");
  c.data.delimiter = delimiter[0];
  if (c.data.source == DataSection::Source::kCsv) {
    if (c.data.path.empty() || c.data.schema_path.empty()) {
      throw InvalidConfig("data: csv source needs 'path' and 'schema'");
    }
    if (d.contains("synth")) throw InvalidConfig("data: 'synth' settings given for a csv source");
  } else if (d.contains("synth")) {
    parse_synth(d.at("synth"), c.data.synth);
  }

  auto& p = c.pipeline;
  if (doc.contains("split")) {
    check_keys(doc.at("split"), {"train_fraction"}, "split");
    read(doc.at("split"), "train_fraction", p.train_fraction, "split");
  }
  if (!(p.train_fraction > 0.0 && p.train_fraction < 1.0)) {
    throw InvalidConfig("split.train_fraction must lie strictly between 0 and 1");
  }

  if (doc.contains("recommender")) {
    const json& r = doc.at("recommender");
    check_keys(r,
               {"mode", "gmf_dim", "mlp_dim", "tower", "explicit_dims", "zero_context_weights",
                "training"},
               "recommender");
    if (r.contains("mode")) {
      std::string mode;
      read(r, "mode", mode, "recommender");
      p.mode = rec::parse_context_mode(mode);
    }
    read(r, "gmf_dim", p.model.gmf_dim, "recommender");
    read(r, "mlp_dim", p.model.mlp_dim, "recommender");
    read(r, "tower", p.model.tower, "recommender");
    read(r, "explicit_dims", p.explicit_dims, "recommender");
    read(r, "zero_context_weights", p.model.zero_context_weights, "recommender");
    if (r.contains("training")) p.rec_training = parse_training(r.at("training"));
  }
  if (p.model.gmf_dim == 0 || p.model.mlp_dim == 0 || p.model.tower.empty()) {
    throw InvalidConfig("recommender: gmf_dim, mlp_dim and tower must be non-empty");
  }
  for (auto width : p.model.tower) {
    if (width == 0) throw InvalidConfig("recommender.tower: layer widths must be positive");
  }
  if (p.mode == rec::ContextMode::kExplicit && p.explicit_dims.empty()) {
    throw InvalidConfig("recommender: explicit mode needs 'explicit_dims'");
  }
  if (p.mode != rec::ContextMode::kExplicit && !p.explicit_dims.empty()) {
    throw InvalidConfig("recommender: 'explicit_dims' only applies to explicit mode");
  }

  const bool latent = p.mode == rec::ContextMode::kLatentCurrent ||
                      p.mode == rec::ContextMode::kLatentSequential;
  if (doc.contains("encoder")) {
    const json& e = doc.at("encoder");
    check_keys(e, {"latent_dim", "sequence_length", "slc_source", "training"}, "encoder");
    read(e, "latent_dim", p.encoder.latent_dim, "encoder");
    read(e, "sequence_length", p.encoder.sequence_length, "encoder");
    if (e.contains("slc_source")) {
      std::string slc;
      read(e, "slc_source", slc, "encoder");
      p.encoder.slc = encoders::parse_slc_source(slc);
    }
    if (e.contains("training")) p.encoder.training = parse_training(e.at("training"));
  } else if (latent) {
    throw InvalidConfig("recommender mode '" + std::string(rec::context_mode_name(p.mode)) +
                        "' needs an 'encoder' section");
  }
  if (p.encoder.latent_dim == 0) throw InvalidConfig("encoder.latent_dim must be positive");
  if (p.encoder.sequence_length == 0) throw InvalidConfig("encoder.sequence_length must be >= 1");

  if (doc.contains("eval")) {
    const json& e = doc.at("eval");
    check_keys(e, {"ks", "positive_threshold", "n_negatives"}, "eval");
    read(e, "ks", p.eval.ks, "eval");
    read(e, "positive_threshold", p.eval.positive_threshold, "eval");
    read(e, "n_negatives", p.eval.n_negatives, "eval");
  }
  for (auto k : p.eval.ks) {
    if (k == 0 || k > p.eval.n_negatives + 1) {
      throw InvalidConfig("eval.ks: each k must lie in 1..n_negatives+1");
    }
  }

  if (doc.contains("sweep")) {
    check_keys(doc.at("sweep"), {"lengths"}, "sweep");
    read(doc.at("sweep"), "lengths", c.sweep_lengths, "sweep");
  }
  for (auto l : c.sweep_lengths) {
    if (l == 0) throw InvalidConfig("sweep.lengths must be positive");
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidConfig(path + ": " + e.what());
  }
  return parse_run_config(doc, fs::path(path).parent_path().string());
}

json run_config_to_json(const RunConfig& c) {
  const auto& p = c.pipeline;
  json data = {{"source", c.data.source == DataSection::Source::kSynth ? "synth" : "csv"},
               {"delimiter", std::string(1, c.data.delimiter)}};
  if (!c.data.path.empty()) data["path"] = c.data.path;
  if (!c.data.schema_path.empty()) data["schema"] = c.data.schema_path;
  if (c.data.source == DataSection::Source::kSynth) data["synth"] = synth_to_json(c.data.synth);
  json encoder = {{"latent_dim", p.encoder.latent_dim},
                  {"sequence_length", p.encoder.sequence_length},
                  {"slc_source", std::string(encoders::slc_source_name(p.encoder.slc))},
                  {"training", training_to_json(p.encoder.training)}};
  json recommender = {{"mode", std::string(rec::context_mode_name(p.mode))},
                      {"gmf_dim", p.model.gmf_dim},
                      {"mlp_dim", p.model.mlp_dim},
                      {"tower", p.model.tower},
                      {"explicit_dims", p.explicit_dims},
                      {"zero_context_weights", p.model.zero_context_weights},
                      {"training", training_to_json(p.rec_training)}};
  return {{"output_dir", c.output_dir},
          {"seeds", c.seeds},
          {"data", data},
          {"split", {{"train_fraction", p.train_fraction}}},
          {"encoder", encoder},
          {"recommender", recommender},
          {"eval",
           {{"ks", p.eval.ks},
            {"positive_threshold", p.eval.positive_threshold},
            {"n_negatives", p.eval.n_negatives}}},
          {"sweep", {{"lengths", c.sweep_lengths}}}};
}

data::SchemaDocument load_schema_document(const RunConfig& config) {
  if (!config.data.schema_path.empty()) return data::load_schema(config.data.schema_path);
  return data::default_synth_schema();
}

data::Dataset load_dataset(const RunConfig& config) {
  const auto schema = load_schema_document(config);
  if (config.data.source == DataSection::Source::kCsv) {
    data::CsvFormat format;
    format.delimiter = config.data.delimiter;
    return data::load_interactions(config.data.path, schema, format);
  }
  data::SynthConfig synth = config.data.synth;
  synth.schema = schema;
  return data::synth_dataset(synth);
}

StageKeys stage_keys(const RunConfig& config, std::uint64_t seed) {
  const json doc = run_config_to_json(config);
  std::string upstream =
      doc.at("data").dump() + doc.at("split").dump() + "seed=" + std::to_string(seed);
  if (!config.data.schema_path.empty()) upstream += nn::file_digest(config.data.schema_path);
  if (config.data.source == DataSection::Source::kCsv) upstream += nn::file_digest(config.data.path);
  StageKeys keys;
  const std::string mode = std::string(rec::context_mode_name(config.pipeline.mode));
  keys.encoder = key_of(upstream + "mode=" + mode + doc.at("encoder").dump());
  keys.recommender = key_of(keys.encoder + doc.at("recommender").dump());
  keys.eval = key_of(keys.recommender + doc.at("eval").dump());
  return keys;
}

}  // namespace ctxrec::cli
