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

#include "ctxrec/eval/pipeline.hpp"

#include <cstdio>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/random.hpp"

namespace ctxrec::eval {

StageSeeds StageSeeds::from(std::uint64_t seed) {
  return {mix_seed(seed, 11), mix_seed(seed, 12), mix_seed(seed, 13), mix_seed(seed, 14)};
}

SampledCandidatePolicy make_sampled_policy(const rec::NeuMfModel& model, const data::Dataset& train,
                                           const data::Dataset& test, std::size_t n_negatives) {
  std::vector<std::vector<std::size_t>> rated(model.users().size());
  for (const auto* ds : {&train, &test}) {
    for (const auto& r : ds->interactions()) {
      const auto u = model.users().find(r.user_id);
      const auto i = model.items().find(r.item_id);
      if (u && i) rated[*u].push_back(*i);
    }
  }
  return SampledCandidatePolicy(model.items().size(), std::move(rated), n_negatives);
}

EvalReport evaluate(const rec::NeuMfModel& model, const data::Dataset& test,
                    const rec::ContextSource& source, const EvalConfig& config,
                    const CandidatePolicy* policy, const data::Dataset* history) {
  const auto rows = rec::assemble_rows(test, source, model.users(), model.items(), history, true);
  EvalReport report;
  report.n_test = rows.rows.size();
  report.n_skipped = rows.skipped_unknown;
  if (rows.rows.empty()) throw EmptyInput("no evaluable test interactions");
  std::vector<double> preds;
  std::vector<double> targets;
  preds.reserve(rows.rows.size());
  targets.reserve(rows.rows.size());
  for (const auto& row : rows.rows) {
    preds.push_back(model.predict(row.user, row.item, row.context));
    targets.push_back(row.target);
  }
  report.rmse = rmse(preds, targets);
  report.mae = mae(preds, targets);

  if (!config.ks.empty()) {
    if (policy == nullptr) throw InvalidConfig("hit@k requested without a candidate policy");
    std::map<std::size_t, std::size_t> hit_counts;
    for (std::size_t k : config.ks) {
      if (k == 0) throw InvalidConfig("k must be at least 1");
      hit_counts[k] = 0;
    }
    std::vector<double> scores;
    for (std::size_t r = 0; r < rows.rows.size(); ++r) {
      const auto& row = rows.rows[r];
      if (row.target < config.positive_threshold) continue;
      Rng rng(mix_seed(config.seed, rows.source_index[r]));
      const auto candidates = policy->candidates(row.user, row.item, rng);
      scores.resize(candidates.items.size());
      for (std::size_t j = 0; j < scores.size(); ++j) {
        scores[j] = model.predict(row.user, candidates.items[j], row.context);
      }
      const std::size_t rank = positive_rank(candidates, scores, model.items());
      for (auto& [k, count] : hit_counts) count += rank <= k ? 1 : 0;
      ++report.n_ranked;
    }
    for (const auto& [k, count] : hit_counts) {
      report.hits[k] = report.n_ranked == 0
                           ? 0.0
                           : static_cast<double>(count) / static_cast<double>(report.n_ranked);
    }
  }
  return report;
}

void train_encoders(const data::Dataset& train, const PipelineConfig& config, std::uint64_t seed,
                    PipelineResult& result) {
  nn::TrainingConfig training = config.encoder.training;
  training.seed = StageSeeds::from(seed).encoder;
  const auto fingerprint = train.schema().fingerprint();
  if (config.mode == rec::ContextMode::kLatentCurrent) {
    encoders::EncoderTrainingResult er;
    auto ae = encoders::train_autoencoder(data::binarize_all(train), config.encoder.latent_dim,
                                          training, &er);
    ae.set_schema_fingerprint(fingerprint);
    result.autoencoder = std::make_shared<encoders::AutoEncoder>(std::move(ae));
    result.encoder_result = std::move(er);
  } else if (config.mode == rec::ContextMode::kLatentSequential) {
    const auto sequences = data::generate_sequences(train, config.encoder.sequence_length);
    encoders::EncoderTrainingResult er;
    auto lstm = encoders::train_lstm_encdec(sequences, config.encoder.latent_dim, training, &er,
                                            config.encoder.slc);
    lstm.set_schema_fingerprint(fingerprint);
    result.sequence_encoder = std::make_shared<encoders::LstmEncoderDecoder>(std::move(lstm));
    result.encoder_result = std::move(er);
  }
}

rec::ContextSource make_context_source(const PipelineConfig& config,
                                       const encoders::AutoEncoder* autoencoder,
                                       const encoders::LstmEncoderDecoder* sequence_encoder) {
  rec::ContextSource source;
  source.mode = config.mode;
  source.explicit_dims = config.explicit_dims;
  source.autoencoder = autoencoder;
  source.sequence_encoder = sequence_encoder;
  return source;
}

rec::NeuMfModel train_recommender(const data::Dataset& train, const rec::ContextSource& source,
                                  const PipelineConfig& config, std::uint64_t seed,
                                  nn::TrainingTrace* trace) {
  const StageSeeds seeds = StageSeeds::from(seed);
  auto [users, items] = rec::build_vocabularies(train);
  rec::ModelConfig mc = config.model;
  mc.mode = config.mode;
  mc.context_length = source.context_length(train.schema());
  mc.seed = seeds.model_init;
  mc.rating_min = train.rating_scale().min;
  mc.rating_max = train.rating_scale().max;
  auto model = rec::build_model(mc, std::move(users), std::move(items));
  const auto rows = rec::assemble_rows(train, source, model.users(), model.items());
  nn::TrainingConfig rt = config.rec_training;
  rt.seed = seeds.rec_shuffle;
  auto t = rec::train(model, rows.rows, rt);
  if (trace != nullptr) *trace = std::move(t);
  return model;
}

EvalReport evaluate_split(const rec::NeuMfModel& model, const data::Dataset& train,
                          const data::Dataset& test, const rec::ContextSource& source,
                          const PipelineConfig& config, std::uint64_t seed) {
  EvalConfig ec = config.eval;
  ec.seed = StageSeeds::from(seed).eval;
  std::optional<SampledCandidatePolicy> policy;
  if (!ec.ks.empty()) policy.emplace(make_sampled_policy(model, train, test, ec.n_negatives));
  return evaluate(model, test, source, ec, policy ? &*policy : nullptr, &train);
}

PipelineResult run_pipeline(const data::Dataset& ds, const PipelineConfig& config,
                            std::uint64_t seed) {
  const auto [train, test] = data::time_split(ds, config.train_fraction);
  PipelineResult result;
  train_encoders(train, config, seed, result);
  const auto source =
      make_context_source(config, result.autoencoder.get(), result.sequence_encoder.get());
  result.model = std::make_shared<rec::NeuMfModel>(
      train_recommender(train, source, config, seed, &result.rec_trace));
  result.report = evaluate_split(*result.model, train, test, source, config, seed);
  return result;
}

std::vector<SweepRow> sequence_length_sweep(const data::Dataset& ds,
                                            const std::vector<std::size_t>& lengths,
                                            const PipelineConfig& config, std::uint64_t seed) {
  std::vector<SweepRow> rows;
  for (std::size_t length : lengths) {
    if (length == 0 || length > ds.size()) {
      throw InvalidConfig("sweep length " + std::to_string(length) + " outside 1.." +
                          std::to_string(ds.size()));
    }
    PipelineConfig pc = config;
    pc.mode = rec::ContextMode::kLatentSequential;
    pc.encoder.sequence_length = length;
    const auto result = run_pipeline(ds, pc, seed);
    rows.push_back({length, result.report.rmse, result.report.mae, seed});
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, bool with_header) {
  std::string out = with_header ? "L,rmse,mae,seed\n" : "";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%llu\n", r.length, r.rmse, r.mae,
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

}  // namespace ctxrec::eval
