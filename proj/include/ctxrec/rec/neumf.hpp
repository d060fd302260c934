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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxrec/data/dataset.hpp"
#include "ctxrec/encoders/encoders.hpp"
#include "ctxrec/nn/layers.hpp"
#include "ctxrec/nn/parameters.hpp"
#include "ctxrec/nn/trainer.hpp"
#include "json.hpp"

namespace ctxrec::rec {

/// none = plain NeuMF; explicit = ENCM; latent_current = LNCM;
/// latent_sequential = SLCM.
enum class ContextMode { kNone, kExplicit, kLatentCurrent, kLatentSequential };

std::string_view context_mode_name(ContextMode mode);
ContextMode parse_context_mode(std::string_view name);

struct ModelConfig {
  std::size_t gmf_dim = 8;
  std::size_t mlp_dim = 16;
  std::vector<std::size_t> tower = {64, 32, 16, 8};
  ContextMode mode = ContextMode::kNone;
  /// Must be 0 for kNone and positive otherwise.
  std::size_t context_length = 0;
  std::uint64_t seed = 1;
  double rating_min = 1.0;
  double rating_max = 5.0;
  /// Start the context block of the first tower layer at zero.
  bool zero_context_weights = false;
};

/// Materialized example: vocabulary indices, context vector and target.
struct TrainRow {
  std::size_t user = 0;
  std::size_t item = 0;
  std::vector<double> context;
  double target = 0.0;
};

/// Neural matrix factorization with an optional context vector.
///
///   GMF path:  p_u (.) q_i
///   MLP path:  ReLU tower over concat(user_emb, item_emb, context)
///   score s = fusion([GMF; MLP top]);  r = min + (max - min) * sigmoid(s)
///
/// The first tower layer keeps separate weight blocks for the embedding
/// columns and the context columns, each initialized by its own fan-in.
class NeuMfModel {
 public:
  NeuMfModel(const ModelConfig& config, nn::Vocabulary users, nn::Vocabulary items);

  const ModelConfig& config() const { return config_; }
  const nn::Vocabulary& users() const { return users_; }
  const nn::Vocabulary& items() const { return items_; }
  std::size_t tower_input_width() const { return 2 * config_.mlp_dim + config_.context_length; }
  std::size_t fusion_input_width() const { return config_.gmf_dim + config_.tower.back(); }

  /// Index-based prediction. Throws UnknownUser / UnknownItem for
  /// out-of-range indices and ShapeMismatch for a context of the wrong length.
  double predict(std::size_t user, std::size_t item, std::span<const double> context) const;
  double predict(const std::string& user_id, const std::string& item_id,
                 std::span<const double> context) const;
  /// Fusion output before the rating-scale mapping.
  double raw_score(std::size_t user, std::size_t item, std::span<const double> context) const;
  double scale_score(double raw) const;

  /// Squared error of one row; accumulates its gradient into `grads` unless empty.
  double example_loss(std::span<const double> params, const TrainRow& row,
                      std::span<double> grads) const;

  nn::ParameterSet& parameters() { return params_; }
  const nn::ParameterSet& parameters() const { return params_; }
  const nn::DenseLayer& fusion_layer() const { return fusion_; }

 private:
  struct Forward;
  double forward(std::span<const double> params, std::size_t user, std::size_t item,
                 std::span<const double> context, Forward& fw) const;
  void validate(std::size_t user, std::size_t item, std::span<const double> context) const;

  ModelConfig config_;
  nn::Vocabulary users_;
  nn::Vocabulary items_;
  nn::ParameterSet params_;
  nn::EmbeddingTable gmf_user_;
  nn::EmbeddingTable gmf_item_;
  nn::EmbeddingTable mlp_user_;
  nn::EmbeddingTable mlp_item_;
  nn::DenseLayer tower_in_;          // embedding block of layer 0, identity
  std::size_t context_weight_ = 0;   // offset of tower0.context_weight
  std::vector<nn::DenseLayer> tower_;  // layers 1.. (ReLU)
  nn::DenseLayer fusion_;
};

/// Validates the config and initializes from config.seed. Throws InvalidConfig.
NeuMfModel build_model(const ModelConfig& config, nn::Vocabulary users, nn::Vocabulary items);

/// User and item vocabularies in first-appearance (time) order.
std::pair<nn::Vocabulary, nn::Vocabulary> build_vocabularies(const data::Dataset& ds);

/// How context vectors are produced for each interaction.
struct ContextSource {
  ContextMode mode = ContextMode::kNone;
  std::vector<std::string> explicit_dims;
  const encoders::AutoEncoder* autoencoder = nullptr;
  const encoders::LstmEncoderDecoder* sequence_encoder = nullptr;

  std::size_t context_length(const data::FeatureSchema& schema) const;
};

/// Context vector for every interaction of `ds`, in order.
///
/// For latent_sequential the window of interaction i is the L vectors ending
/// at i. `history` (e.g. the training split when assembling test rows)
/// supplies the vectors preceding ds[0]; positions still short of L vectors
/// use their own vector repeated L times.
///
/// Throws EncoderSchemaMismatch when an encoder was trained on another
/// schema or width.
std::vector<std::vector<double>> assemble_contexts(const data::Dataset& ds,
                                                   const ContextSource& source,
                                                   const data::Dataset* history = nullptr);

struct RowSet {
  std::vector<TrainRow> rows;
  /// Position in the dataset of each row.
  std::vector<std::size_t> source_index;
  /// Interactions dropped because the user or item is not in the vocabulary.
  std::size_t skipped_unknown = 0;
};

/// One row per interaction. Unknown ids throw UnknownUser / UnknownItem
/// unless `skip_unknown` is set.
RowSet assemble_rows(const data::Dataset& ds, const ContextSource& source,
                     const nn::Vocabulary& users, const nn::Vocabulary& items,
                     const data::Dataset* history = nullptr, bool skip_unknown = false);

/// Mini-batch MSE regression. Throws EmptyInput or DivergedTraining.
nn::TrainingTrace train(NeuMfModel& model, const std::vector<TrainRow>& rows,
                        const nn::TrainingConfig& config);

/// Model bundle: header (mode, dims, scale, vocabularies, provenance) plus
/// the parameter container.
struct BundleInfo {
  std::uint64_t schema_fingerprint = 0;
  std::string encoder_digest;
  std::vector<std::string> explicit_dims;
  std::size_t sequence_length = 0;
};

void save_bundle(const std::string& path, const NeuMfModel& model, const BundleInfo& info);
NeuMfModel load_bundle(const std::string& path, BundleInfo* info = nullptr);

}  // namespace ctxrec::rec
