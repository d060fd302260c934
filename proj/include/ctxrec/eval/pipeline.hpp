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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctxrec/data/dataset.hpp"
#include "ctxrec/encoders/encoders.hpp"
#include "ctxrec/eval/metrics.hpp"
#include "ctxrec/nn/trainer.hpp"
#include "ctxrec/rec/neumf.hpp"

namespace ctxrec::eval {

struct EvalConfig {
  std::vector<std::size_t> ks = {1, 3, 5};
  /// Ratings at or above this count as positive indications for hit@k.
  double positive_threshold = 3.0;
  std::size_t n_negatives = 99;
  std::uint64_t seed = 1;
};

/// Default candidate policy: negatives sampled from items the user rated
/// neither in `train` nor in `test`.
SampledCandidatePolicy make_sampled_policy(const rec::NeuMfModel& model, const data::Dataset& train,
                                           const data::Dataset& test, std::size_t n_negatives);

/// RMSE/MAE over every test interaction with a known user and item; hit@k
/// averaged over those whose rating reaches the positive threshold. Each
/// interaction draws candidates from its own seed-derived stream.
/// `policy` may be null when config.ks is empty.
EvalReport evaluate(const rec::NeuMfModel& model, const data::Dataset& test,
                    const rec::ContextSource& source, const EvalConfig& config,
                    const CandidatePolicy* policy, const data::Dataset* history = nullptr);

struct EncoderSettings {
  std::size_t latent_dim = 8;
  std::size_t sequence_length = 3;
  encoders::SlcSource slc = encoders::SlcSource::kEncoderHidden;
  nn::TrainingConfig training;
};

/// Everything needed to go from a dataset to an EvalReport.
struct PipelineConfig {
  double train_fraction = 0.7;
  rec::ContextMode mode = rec::ContextMode::kLatentSequential;
  std::vector<std::string> explicit_dims;
  EncoderSettings encoder;
  /// mode/context_length/seed/rating scale are filled in by the pipeline.
  rec::ModelConfig model;
  nn::TrainingConfig rec_training;
  EvalConfig eval;
};

/// Seeds for each stochastic stage, derived from one run seed.
struct StageSeeds {
  std::uint64_t encoder;
  std::uint64_t model_init;
  std::uint64_t rec_shuffle;
  std::uint64_t eval;
  static StageSeeds from(std::uint64_t seed);
};

struct PipelineResult {
  EvalReport report;
  nn::TrainingTrace rec_trace;
  std::optional<encoders::EncoderTrainingResult> encoder_result;
  std::shared_ptr<encoders::AutoEncoder> autoencoder;
  std::shared_ptr<encoders::LstmEncoderDecoder> sequence_encoder;
  std::shared_ptr<rec::NeuMfModel> model;
};

/// Trains the encoder the mode needs (on the training split only).
void train_encoders(const data::Dataset& train, const PipelineConfig& config, std::uint64_t seed,
                    PipelineResult& result);

/// Context source for the configured mode over the given encoders (either may be null).
rec::ContextSource make_context_source(const PipelineConfig& config,
                                       const encoders::AutoEncoder* autoencoder,
                                       const encoders::LstmEncoderDecoder* sequence_encoder);

/// Builds and trains the recommender on the training split.
rec::NeuMfModel train_recommender(const data::Dataset& train, const rec::ContextSource& source,
                                  const PipelineConfig& config, std::uint64_t seed,
                                  nn::TrainingTrace* trace = nullptr);

/// Evaluates on the test split with the training split as sequence history
/// and the default sampled candidate policy.
EvalReport evaluate_split(const rec::NeuMfModel& model, const data::Dataset& train,
                          const data::Dataset& test, const rec::ContextSource& source,
                          const PipelineConfig& config, std::uint64_t seed);

/// time_split -> encoder training -> row assembly -> recommender training
/// -> evaluation.
PipelineResult run_pipeline(const data::Dataset& ds, const PipelineConfig& config,
                            std::uint64_t seed);

struct SweepRow {
  std::size_t length = 0;
  double rmse = 0.0;
  double mae = 0.0;
  std::uint64_t seed = 0;
};

/// For each L: regenerate sequences, retrain the LSTM encoder-decoder and the
/// SLCM recommender, evaluate. One row per requested length, in order.
std::vector<SweepRow> sequence_length_sweep(const data::Dataset& ds,
                                            const std::vector<std::size_t>& lengths,
                                            const PipelineConfig& config, std::uint64_t seed);

/// CSV with header `L,rmse,mae,seed`.
std::string sweep_to_csv(const std::vector<SweepRow>& rows, bool with_header = true);

}  // namespace ctxrec::eval
