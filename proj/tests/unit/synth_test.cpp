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

#include <cmath>
#include <set>
#include <sstream>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/data/synth.hpp"

namespace ctxrec::data {
namespace {

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.n_users = 20;
  cfg.n_items = 30;
  cfg.n_interactions = 800;
  cfg.schema = default_synth_schema();
  return cfg;
}

TEST(Synth, ShapeAndOrdering) {
  const auto out = synthesize(small_config());
  const auto& ds = out.dataset;
  ASSERT_EQ(ds.size(), 800u);
  EXPECT_EQ(out.expected_rating.size(), 800u);
  EXPECT_EQ(out.context_term.size(), 800u);
  std::set<std::string> users;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i > 0) EXPECT_LT(ds[i - 1].timestamp, ds[i].timestamp);
    EXPECT_TRUE(ds.rating_scale().contains(ds[i].rating));
    EXPECT_EQ(ds[i].context.size(), ds.schema().dimensions().size());
    users.insert(ds[i].user_id);
  }
  EXPECT_LE(users.size(), 20u);
  EXPECT_EQ(ds[0].timestamp >= small_config().start_time, true);
}

TEST(Synth, SameSeedSameBytes) {
  std::ostringstream a;
  std::ostringstream b;
  write_interactions(a, synth_dataset(small_config()));
  write_interactions(b, synth_dataset(small_config()));
  EXPECT_EQ(a.str(), b.str());
  auto other = small_config();
  other.seed = 2;
  std::ostringstream c;
  write_interactions(c, synth_dataset(other));
  EXPECT_NE(a.str(), c.str());
}

TEST(Synth, ReingestsThroughLoader) {
  const auto cfg = small_config();
  const auto ds = synth_dataset(cfg);
  std::stringstream buf;
  write_interactions(buf, ds);
  const auto back = read_interactions(buf, cfg.schema);
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); i += 37) {
    EXPECT_EQ(binarize(back[i], back.schema()).values, binarize(ds[i], ds.schema()).values);
    EXPECT_EQ(back[i].rating, ds[i].rating);
  }
}

TEST(Synth, ContextEffectScalesWithHorizon) {
  auto cfg = small_config();
  cfg.signal_horizon = 0;
  for (double t : synthesize(cfg).context_term) EXPECT_EQ(t, 0.0);
  cfg.signal_horizon = 2;
  const auto terms = synthesize(cfg).context_term;
  double mean = 0.0;
  for (double t : terms) mean += t;
  mean /= static_cast<double>(terms.size());
  double var = 0.0;
  for (double t : terms) var += (t - mean) * (t - mean);
  const double sd = std::sqrt(var / static_cast<double>(terms.size()));
  EXPECT_NEAR(sd, cfg.context_effect, 0.05);
}

// The planted context term of interaction i depends only on the contexts of
// interactions i-h+1..i: changing an older one leaves it unchanged.
TEST(Synth, ContextTermUsesOnlyTheHorizon) {
  auto cfg = small_config();
  cfg.signal_horizon = 2;
  const auto out = synthesize(cfg);
  const auto vectors = binarize_all(out.dataset);
  for (std::size_t i = 2; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < std::min(vectors.size(), i + 200); ++j) {
      if (vectors[i].values == vectors[j].values &&
          vectors[i - 1].values == vectors[j - 1].values) {
        EXPECT_DOUBLE_EQ(out.context_term[i], out.context_term[j]);
      }
    }
  }
}

TEST(Synth, DiscreteScaleIsRespected) {
  auto cfg = small_config();
  cfg.schema.rating_scale = RatingScale{1.0, 5.0, {1.0, 3.0, 5.0}, {}};
  const auto ds = synth_dataset(cfg);
  for (const auto& r : ds.interactions()) {
    EXPECT_TRUE(r.rating == 1.0 || r.rating == 3.0 || r.rating == 5.0);
  }
}

TEST(Synth, MissingRateProducesGaps) {
  auto cfg = small_config();
  cfg.missing_rate = 0.2;
  std::size_t missing = 0;
  std::size_t cells = 0;
  const auto ds = synth_dataset(cfg);
  for (const auto& r : ds.interactions()) {
    for (const auto& c : r.context) {
      missing += c.has_value() ? 0 : 1;
      ++cells;
    }
  }
  EXPECT_NEAR(static_cast<double>(missing) / static_cast<double>(cells), 0.2, 0.03);
}

}  // namespace
}  // namespace ctxrec::data
