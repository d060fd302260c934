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

#include "ctxrec/rec/neumf.hpp"

#include <algorithm>
#include <cmath>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/hash.hpp"
#include "ctxrec/nn/model_file.hpp"
#include "ctxrec/simd/kernels.hpp"

namespace ctxrec::rec {

using nn::Activation;

std::string_view context_mode_name(ContextMode mode) {
  switch (mode) {
    case ContextMode::kNone: return "none";
    case ContextMode::kExplicit: return "explicit";
    case ContextMode::kLatentCurrent: return "latent_current";
    case ContextMode::kLatentSequential: return "latent_sequential";
  }
  return "none";
}

ContextMode parse_context_mode(std::string_view name) {
  if (name == "none") return ContextMode::kNone;
  if (name == "explicit") return ContextMode::kExplicit;
  if (name == "latent_current") return ContextMode::kLatentCurrent;
  if (name == "latent_sequential") return ContextMode::kLatentSequential;
  throw InvalidConfig("unknown context mode '" + std::string(name) + "'");
}

struct NeuMfModel::Forward {
  std::vector<double> gmf;
  std::vector<double> x0;
  std::vector<double> ctx_pre;
  std::vector<std::vector<double>> acts;
  std::vector<double> fusion_in;
  double raw = 0.0;
  double prob = 0.0;
  double rating = 0.0;
};

NeuMfModel::NeuMfModel(const ModelConfig& config, nn::Vocabulary users, nn::Vocabulary items)
    : config_(config), users_(std::move(users)), items_(std::move(items)) {
  if (config_.gmf_dim == 0 || config_.mlp_dim == 0 || config_.tower.empty() ||
      std::find(config_.tower.begin(), config_.tower.end(), 0u) != config_.tower.end()) {
    throw InvalidConfig("embedding dims and tower widths must be positive and the tower non-empty");
  }
  if ((config_.mode == ContextMode::kNone) != (config_.context_length == 0)) {
    throw InvalidConfig("context_length must be 0 exactly when mode is none");
  }
  if (!(config_.rating_min < config_.rating_max)) throw InvalidConfig("rating scale needs min < max");
  if (users_.size() == 0 || items_.size() == 0) throw InvalidConfig("empty user or item vocabulary");

  constexpr double kEmbeddingSd = 0.01;
  gmf_user_ = nn::EmbeddingTable::create(params_, "gmf_user", users_.size(), config_.gmf_dim, kEmbeddingSd);
  gmf_item_ = nn::EmbeddingTable::create(params_, "gmf_item", items_.size(), config_.gmf_dim, kEmbeddingSd);
  mlp_user_ = nn::EmbeddingTable::create(params_, "mlp_user", users_.size(), config_.mlp_dim, kEmbeddingSd);
  mlp_item_ = nn::EmbeddingTable::create(params_, "mlp_item", items_.size(), config_.mlp_dim, kEmbeddingSd);

  tower_in_ = nn::DenseLayer::create(params_, "tower0", 2 * config_.mlp_dim, config_.tower[0],
                                     Activation::kIdentity);
  if (config_.context_length > 0) {
    context_weight_ = params_.add(
        "tower0.context_weight", {config_.tower[0], config_.context_length},
        config_.zero_context_weights ? nn::InitRule::zero()
                                     : nn::InitRule::uniform_fan_in(config_.context_length));
  }
  for (std::size_t k = 1; k < config_.tower.size(); ++k) {
    tower_.push_back(nn::DenseLayer::create(params_, "tower" + std::to_string(k), config_.tower[k - 1],
                                            config_.tower[k], Activation::kRelu));
  }
  fusion_ = nn::DenseLayer::create(params_, "fusion", config_.gmf_dim + config_.tower.back(), 1,
                                   Activation::kIdentity);
  params_.initialize(config_.seed);
}

NeuMfModel build_model(const ModelConfig& config, nn::Vocabulary users, nn::Vocabulary items) {
  return NeuMfModel(config, std::move(users), std::move(items));
}

double NeuMfModel::forward(std::span<const double> params, std::size_t user, std::size_t item,
                           std::span<const double> context, Forward& fw) const {
  const std::size_t dg = config_.gmf_dim;
  const std::size_t dm = config_.mlp_dim;
  const auto gu = gmf_user_.row(params, user);
  const auto gi = gmf_item_.row(params, item);
  fw.gmf.resize(dg);
  for (std::size_t k = 0; k < dg; ++k) fw.gmf[k] = gu[k] * gi[k];

  const auto mu = mlp_user_.row(params, user);
  const auto mi = mlp_item_.row(params, item);
  fw.x0.resize(2 * dm);
  std::copy(mu.begin(), mu.end(), fw.x0.begin());
  std::copy(mi.begin(), mi.end(), fw.x0.begin() + static_cast<std::ptrdiff_t>(dm));

  const std::size_t n_layers = config_.tower.size();
  fw.acts.resize(n_layers);
  auto& a0 = fw.acts[0];
  a0.resize(config_.tower[0]);
  tower_in_.forward(params, fw.x0, a0);
  if (config_.context_length > 0) {
    fw.ctx_pre.resize(a0.size());
    simd::gemv(params.data() + context_weight_, a0.size(), config_.context_length, context.data(),
               fw.ctx_pre.data());
    for (std::size_t j = 0; j < a0.size(); ++j) a0[j] += fw.ctx_pre[j];
  }
  for (double& v : a0) v = v > 0.0 ? v : 0.0;
  for (std::size_t k = 1; k < n_layers; ++k) {
    fw.acts[k].resize(config_.tower[k]);
    tower_[k - 1].forward(params, fw.acts[k - 1], fw.acts[k]);
  }
  fw.fusion_in.resize(fusion_input_width());
  std::copy(fw.gmf.begin(), fw.gmf.end(), fw.fusion_in.begin());
  std::copy(fw.acts.back().begin(), fw.acts.back().end(),
            fw.fusion_in.begin() + static_cast<std::ptrdiff_t>(dg));
  double raw = 0.0;
  fusion_.forward(params, fw.fusion_in, std::span<double>(&raw, 1));
  fw.raw = raw;
  fw.prob = nn::sigmoid(raw);
  fw.rating = config_.rating_min + (config_.rating_max - config_.rating_min) * fw.prob;
  return fw.rating;
}

void NeuMfModel::validate(std::size_t user, std::size_t item,
                          std::span<const double> context) const {
  if (user >= users_.size()) throw UnknownUser("index " + std::to_string(user));
  if (item >= items_.size()) throw UnknownItem("index " + std::to_string(item));
  if (context.size() != config_.context_length) {
    throw ShapeMismatch("context has " + std::to_string(context.size()) + " entries, mode '" +
                        std::string(context_mode_name(config_.mode)) + "' expects " +
                        std::to_string(config_.context_length));
  }
}

double NeuMfModel::raw_score(std::size_t user, std::size_t item,
                             std::span<const double> context) const {
  validate(user, item, context);
  Forward fw;
  forward(params_.values(), user, item, context, fw);
  return fw.raw;
}

double NeuMfModel::scale_score(double raw) const {
  return config_.rating_min + (config_.rating_max - config_.rating_min) * nn::sigmoid(raw);
}

double NeuMfModel::predict(std::size_t user, std::size_t item,
                           std::span<const double> context) const {
  validate(user, item, context);
  thread_local Forward fw;
  return forward(params_.values(), user, item, context, fw);
}

double NeuMfModel::predict(const std::string& user_id, const std::string& item_id,
                           std::span<const double> context) const {
  const auto u = users_.find(user_id);
  if (!u) throw UnknownUser("'" + user_id + "'");
  const auto i = items_.find(item_id);
  if (!i) throw UnknownItem("'" + item_id + "'");
  return predict(*u, *i, context);
}

double NeuMfModel::example_loss(std::span<const double> params, const TrainRow& row,
                                std::span<double> grads) const {
  thread_local Forward fw;
  const double r = forward(params, row.user, row.item, row.context, fw);
  const double err = r - row.target;
  if (grads.empty()) return err * err;

  const std::size_t dg = config_.gmf_dim;
  const std::size_t dm = config_.mlp_dim;
  double ds = 2.0 * err * (config_.rating_max - config_.rating_min) * fw.prob * (1.0 - fw.prob);
  thread_local std::vector<double> d_fusion, d_cur, d_prev, d_x0, d_row;
  d_fusion.assign(fusion_input_width(), 0.0);
  const double raw = fw.raw;
  fusion_.backward(params, grads, fw.fusion_in, std::span<const double>(&raw, 1),
                   std::span<double>(&ds, 1), d_fusion);

  d_cur.assign(d_fusion.begin() + static_cast<std::ptrdiff_t>(dg), d_fusion.end());
  for (std::size_t k = config_.tower.size() - 1; k >= 1; --k) {
    d_prev.assign(config_.tower[k - 1], 0.0);
    tower_[k - 1].backward(params, grads, fw.acts[k - 1], fw.acts[k], d_cur, d_prev);
    d_cur.swap(d_prev);
  }
  const auto& a0 = fw.acts[0];
  for (std::size_t j = 0; j < a0.size(); ++j) d_cur[j] = a0[j] > 0.0 ? d_cur[j] : 0.0;
  if (config_.context_length > 0) {
    simd::outer_acc(d_cur.data(), a0.size(), row.context.data(), config_.context_length,
                    grads.data() + context_weight_);
  }
  d_x0.assign(2 * dm, 0.0);
  tower_in_.backward(params, grads, fw.x0, a0, d_cur, d_x0);

  mlp_user_.accumulate(grads, row.user, std::span<const double>(d_x0).first(dm));
  mlp_item_.accumulate(grads, row.item, std::span<const double>(d_x0).subspan(dm, dm));
  const auto gu = gmf_user_.row(params, row.user);
  const auto gi = gmf_item_.row(params, row.item);
  d_row.resize(dg);
  for (std::size_t k = 0; k < dg; ++k) d_row[k] = d_fusion[k] * gi[k];
  gmf_user_.accumulate(grads, row.user, d_row);
  for (std::size_t k = 0; k < dg; ++k) d_row[k] = d_fusion[k] * gu[k];
  gmf_item_.accumulate(grads, row.item, d_row);
  return err * err;
}

std::pair<nn::Vocabulary, nn::Vocabulary> build_vocabularies(const data::Dataset& ds) {
  nn::Vocabulary users;
  nn::Vocabulary items;
  for (const auto& r : ds.interactions()) {
    users.add(r.user_id);
    items.add(r.item_id);
  }
  return {std::move(users), std::move(items)};
}

std::size_t ContextSource::context_length(const data::FeatureSchema& schema) const {
  switch (mode) {
    case ContextMode::kNone:
      return 0;
    case ContextMode::kExplicit: {
      std::size_t n = 0;
      for (const auto& name : explicit_dims) {
        const auto idx = schema.find(name);
        if (!idx) throw InvalidConfig("explicit context dimension '" + name + "' not in schema");
        n += schema.dimensions()[*idx].width();
      }
      if (n == 0) throw InvalidConfig("explicit mode needs at least one dimension");
      return n;
    }
    case ContextMode::kLatentCurrent:
      if (autoencoder == nullptr) throw InvalidConfig("latent_current mode needs an autoencoder");
      return autoencoder->latent_dim();
    case ContextMode::kLatentSequential:
      if (sequence_encoder == nullptr) {
        throw InvalidConfig("latent_sequential mode needs an LSTM encoder-decoder");
      }
      return sequence_encoder->slc_dim();
  }
  return 0;
}

namespace {

void check_encoder(std::size_t width, std::uint64_t fingerprint, const data::FeatureSchema& schema) {
  if (width != schema.width()) {
    throw EncoderSchemaMismatch("encoder width " + std::to_string(width) + " vs schema width " +
                                std::to_string(schema.width()));
  }
  if (fingerprint != 0 && fingerprint != schema.fingerprint()) {
    throw EncoderSchemaMismatch("encoder schema fingerprint " + to_hex(fingerprint) +
                                " vs dataset schema " + to_hex(schema.fingerprint()));
  }
}

}  // namespace

std::vector<std::vector<double>> assemble_contexts(const data::Dataset& ds,
                                                   const ContextSource& source,
                                                   const data::Dataset* history) {
  const auto& schema = ds.schema();
  std::vector<std::vector<double>> out(ds.size());
  switch (source.mode) {
    case ContextMode::kNone:
      break;
    case ContextMode::kExplicit: {
      std::vector<std::pair<std::size_t, std::size_t>> ranges;
      for (const auto& name : source.explicit_dims) {
        const auto idx = schema.find(name);
        if (!idx) throw InvalidConfig("explicit context dimension '" + name + "' not in schema");
        ranges.emplace_back(schema.column_offset(*idx), schema.dimensions()[*idx].width());
      }
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto v = data::binarize(ds[i], schema);
        for (auto [off, w] : ranges) {
          out[i].insert(out[i].end(), v.values.begin() + static_cast<std::ptrdiff_t>(off),
                        v.values.begin() + static_cast<std::ptrdiff_t>(off + w));
        }
      }
      break;
    }
    case ContextMode::kLatentCurrent: {
      if (source.autoencoder == nullptr) throw InvalidConfig("latent_current mode needs an autoencoder");
      check_encoder(source.autoencoder->width(), source.autoencoder->schema_fingerprint(), schema);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        out[i] = source.autoencoder->encode(data::binarize(ds[i], schema).values).values;
      }
      break;
    }
    case ContextMode::kLatentSequential: {
      const auto* enc = source.sequence_encoder;
      if (enc == nullptr) throw InvalidConfig("latent_sequential mode needs an LSTM encoder-decoder");
      check_encoder(enc->width(), enc->schema_fingerprint(), schema);
      const std::size_t L = enc->sequence_length();
      const std::size_t w = schema.width();
      std::vector<std::vector<double>> vectors;
      if (history != nullptr && L > 1) {
        const std::size_t take = std::min(history->size(), L - 1);
        for (std::size_t k = history->size() - take; k < history->size(); ++k) {
          vectors.push_back(data::binarize((*history)[k], history->schema()).values);
        }
      }
      const std::size_t lead = vectors.size();
      for (const auto& r : ds.interactions()) vectors.push_back(data::binarize(r, schema).values);
      std::vector<double> flat(L * w);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::size_t p = lead + i;
        for (std::size_t t = 0; t < L; ++t) {
          const auto& src = (p + 1 >= L) ? vectors[p + 1 - L + t] : vectors[p];
          std::copy(src.begin(), src.end(), flat.begin() + static_cast<std::ptrdiff_t>(t * w));
        }
        out[i] = enc->encode_flat(flat).values;
      }
      break;
    }
  }
  return out;
}

RowSet assemble_rows(const data::Dataset& ds, const ContextSource& source,
                     const nn::Vocabulary& users, const nn::Vocabulary& items,
                     const data::Dataset* history, bool skip_unknown) {
  auto contexts = assemble_contexts(ds, source, history);
  RowSet set;
  set.rows.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds[i];
    const auto u = users.find(r.user_id);
    const auto it = items.find(r.item_id);
    if (!u || !it) {
      if (skip_unknown) {
        ++set.skipped_unknown;
        continue;
      }
      if (!u) throw UnknownUser("'" + r.user_id + "'");
      throw UnknownItem("'" + r.item_id + "'");
    }
    set.rows.push_back(TrainRow{*u, *it, std::move(contexts[i]), r.rating});
    set.source_index.push_back(i);
  }
  return set;
}

nn::TrainingTrace train(NeuMfModel& model, const std::vector<TrainRow>& rows,
                        const nn::TrainingConfig& config) {
  if (rows.empty()) throw EmptyInput("no training rows");
  for (const auto& row : rows) {
    if (row.context.size() != model.config().context_length) {
      throw ShapeMismatch("training row context length does not match the model's mode");
    }
    if (row.user >= model.users().size()) throw UnknownUser("index " + std::to_string(row.user));
    if (row.item >= model.items().size()) throw UnknownItem("index " + std::to_string(row.item));
  }
  return nn::train_minibatch(
      model.parameters(), rows.size(), config,
      [&](std::span<const double> params, std::span<const std::size_t> batch,
          std::span<double> grads) {
        double sum = 0.0;
        for (std::size_t idx : batch) sum += model.example_loss(params, rows[idx], grads);
        return sum;
      });
}

void save_bundle(const std::string& path, const NeuMfModel& model, const BundleInfo& info) {
  const auto& c = model.config();
  nlohmann::json h;
  h["kind"] = "neumf";
  h["mode"] = std::string(context_mode_name(c.mode));
  h["gmf_dim"] = c.gmf_dim;
  h["mlp_dim"] = c.mlp_dim;
  h["tower"] = c.tower;
  h["context_length"] = c.context_length;
  h["rating_scale"] = {{"min", c.rating_min}, {"max", c.rating_max}};
  h["schema_fingerprint"] = to_hex(info.schema_fingerprint);
  h["encoder_digest"] = info.encoder_digest;
  h["explicit_dims"] = info.explicit_dims;
  h["sequence_length"] = info.sequence_length;
  h["users"] = model.users().ids();
  h["items"] = model.items().ids();
  nn::write_model_file(path, h, model.parameters());
}

NeuMfModel load_bundle(const std::string& path, BundleInfo* info) {
  auto file = nn::read_model_file(path);
  const auto& h = file.header;
  if (h.value("kind", std::string()) != "neumf") throw ParseError(path + ": not a model bundle");
  ModelConfig c;
  c.mode = parse_context_mode(h.at("mode").get<std::string>());
  c.gmf_dim = h.at("gmf_dim").get<std::size_t>();
  c.mlp_dim = h.at("mlp_dim").get<std::size_t>();
  c.tower = h.at("tower").get<std::vector<std::size_t>>();
  c.context_length = h.at("context_length").get<std::size_t>();
  c.rating_min = h.at("rating_scale").at("min").get<double>();
  c.rating_max = h.at("rating_scale").at("max").get<double>();
  nn::Vocabulary users;
  nn::Vocabulary items;
  for (const auto& id : h.at("users")) users.add(id.get<std::string>());
  for (const auto& id : h.at("items")) items.add(id.get<std::string>());
  NeuMfModel model(c, std::move(users), std::move(items));
  nn::load_values(model.parameters(), file.params);
  if (info != nullptr) {
    info->schema_fingerprint = std::stoull(h.at("schema_fingerprint").get<std::string>(), nullptr, 16);
    info->encoder_digest = h.value("encoder_digest", std::string());
    info->explicit_dims = h.value("explicit_dims", std::vector<std::string>{});
    info->sequence_length = h.value("sequence_length", std::size_t{0});
  }
  return model;
}

}  // namespace ctxrec::rec
