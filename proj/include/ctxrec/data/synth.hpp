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
#include <vector>

#include "ctxrec/data/dataset.hpp"

namespace ctxrec::data {

/// Generator settings for planted-signal benchmark data.
///
/// rating = midpoint + user bias + item bias + <user factor, item factor>
///          + context term + N(0, noise_sd), clamped to the rating scale
///
/// The context term is a fixed random linear read-out of the mean binarized
/// context over the `signal_horizon` most recent interactions (the current
/// one included, across all users), standardized to sd `context_effect`.
/// With signal_horizon = 0 the term is identically zero.
struct SynthConfig {
  std::size_t n_users = 200;
  std::size_t n_items = 300;
  std::size_t n_interactions = 20000;
  SchemaDocument schema;
  std::size_t signal_horizon = 2;
  double noise_sd = 0.3;
  std::uint64_t seed = 1;

  std::size_t latent_rank = 4;
  double affinity_sd = 0.6;
  double bias_sd = 0.2;
  double context_effect = 0.5;
  /// Probability that a context dimension keeps its previous value.
  double persistence = 0.3;
  double missing_rate = 0.0;
  std::int64_t start_time = 1425839089;  // 2015-03-08T18:24:49Z
  double mean_gap_seconds = 300.0;
};

/// Built-in schema used when a synth config names none: four nominal and two
/// numeric dimensions (14 binarized columns) on a continuous 1-5 scale.
SchemaDocument default_synth_schema();

/// Generated data together with the planted components, for oracles.
struct SynthOutput {
  Dataset dataset;
  /// Noise-free rating before clamping, per interaction in time order.
  std::vector<double> expected_rating;
  /// Context contribution included in expected_rating.
  std::vector<double> context_term;
};

/// Throws InvalidSpec on non-positive counts or negative noise.
SynthOutput synthesize(const SynthConfig& config);
Dataset synth_dataset(const SynthConfig& config);

}  // namespace ctxrec::data
