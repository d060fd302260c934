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

#include <gtest/gtest.h>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/data/synth.hpp"
#include "ctxrec/eval/pipeline.hpp"

namespace ctxrec::eval {
namespace {

data::Dataset small_dataset() {
  data::SynthConfig cfg;
  cfg.n_users = 15;
  cfg.n_items = 40;
  cfg.n_interactions = 600;
  cfg.schema = data::default_synth_schema();
  return data::synth_dataset(cfg);
}

PipelineConfig fast_config(rec::ContextMode mode) {
  PipelineConfig c;
  c.mode = mode;
  c.encoder.latent_dim = 4;
  c.encoder.sequence_length = 2;
  c.encoder.training.batch_size = 64;
  c.encoder.training.iterations = 3;
  c.model.tower = {8, 4};
  c.rec_training.batch_size = 64;
  c.rec_training.iterations = 3;
  c.eval.n_negatives = 20;
  if (mode == rec::ContextMode::kExplicit) c.explicit_dims = {"weather"};
  return c;
}

TEST(Pipeline, RunsEveryMode) {
  const auto ds = small_dataset();
  for (auto mode : {rec::ContextMode::kNone, rec::ContextMode::kExplicit,
                    rec::ContextMode::kLatentCurrent, rec::ContextMode::kLatentSequential}) {
    const auto r = run_pipeline(ds, fast_config(mode), 1);
    EXPECT_GT(r.report.rmse, 0.0) << rec::context_mode_name(mode);
    EXPECT_LE(r.report.mae, r.report.rmse);
    EXPECT_EQ(r.report.n_test + r.report.n_skipped, 180u);
    EXPECT_EQ(r.report.hits.size(), 3u);
    EXPECT_EQ(r.rec_trace.epoch_loss.size(), 3u);
    EXPECT_EQ(r.encoder_result.has_value(), mode == rec::ContextMode::kLatentCurrent ||
                                                mode == rec::ContextMode::kLatentSequential);
  }
}

TEST(Pipeline, Deterministic) {
  const auto ds = small_dataset();
  const auto cfg = fast_config(rec::ContextMode::kLatentSequential);
  const auto a = run_pipeline(ds, cfg, 3);
  const auto b = run_pipeline(ds, cfg, 3);
  EXPECT_EQ(a.report.to_json().dump(), b.report.to_json().dump());
  const auto c = run_pipeline(ds, cfg, 4);
  EXPECT_NE(a.report.rmse, c.report.rmse);
}

TEST(Evaluate, HitsRequirePolicy) {
  const auto ds = small_dataset();
  const auto [train, test] = data::time_split(ds, 0.7);
  const auto cfg = fast_config(rec::ContextMode::kNone);
  const auto source = make_context_source(cfg, nullptr, nullptr);
  const auto model = train_recommender(train, source, cfg, 1);
  EXPECT_THROW(evaluate(model, test, source, cfg.eval, nullptr), InvalidConfig);
  EvalConfig no_hits = cfg.eval;
  no_hits.ks.clear();
  const auto r = evaluate(model, test, source, no_hits, nullptr);
  EXPECT_TRUE(r.hits.empty());
  EXPECT_EQ(r.n_ranked, 0u);
}

// Hits are monotone in k and use the sampled policy's candidate count.
TEST(Evaluate, HitsMonotoneInK) {
  const auto ds = small_dataset();
  auto cfg = fast_config(rec::ContextMode::kNone);
  cfg.eval.ks = {1, 2, 5, 10, 21};
  const auto r = run_pipeline(ds, cfg, 2).report;
  double prev = 0.0;
  for (const auto& [k, h] : r.hits) {
    EXPECT_GE(h, prev);
    prev = h;
  }
  EXPECT_DOUBLE_EQ(r.hits.at(21), 1.0);
}

TEST(Sweep, OneRowPerLength) {
  const auto ds = small_dataset();
  const auto rows = sequence_length_sweep(ds, {1, 3}, fast_config(rec::ContextMode::kNone), 9);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].length, 3u);
  EXPECT_EQ(rows[1].seed, 9u);
  const auto csv = sweep_to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "L,rmse,mae,seed");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_THROW(sequence_length_sweep(ds, {0}, fast_config(rec::ContextMode::kNone), 1),
               InvalidConfig);
}

}  // namespace
}  // namespace ctxrec::eval
