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

#include "ctxrec/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/random.hpp"

namespace ctxrec::data {

SchemaDocument default_synth_schema() {
  std::vector<Dimension> dims = {
      {"time_of_day", DimensionKind::kNominal, {"morning", "afternoon", "evening", "night"}},
      {"day_type", DimensionKind::kNominal, {"weekday", "weekend"}},
      {"weather", DimensionKind::kNominal, {"sunny", "cloudy", "rainy"}},
      {"activity", DimensionKind::kNominal, {"still", "walking", "driving"}},
      {"light", DimensionKind::kNumeric, {}, 0.0, 1.0},
      {"battery", DimensionKind::kNumeric, {}, 0.0, 1.0},
  };
  SchemaDocument doc{FeatureSchema(std::move(dims)), RatingScale{}};
  doc.rating_scale.min = 1.0;
  doc.rating_scale.max = 5.0;
  return doc;
}

SynthOutput synthesize(const SynthConfig& cfg) {
  if (cfg.n_users == 0 || cfg.n_items == 0 || cfg.n_interactions == 0) {
    throw InvalidSpec("synth counts must be positive");
  }
  if (!(cfg.noise_sd >= 0.0) || !(cfg.mean_gap_seconds > 0.0) || cfg.latent_rank == 0) {
    throw InvalidSpec("synth noise_sd must be >= 0, mean_gap_seconds > 0, latent_rank > 0");
  }
  if (!(cfg.missing_rate >= 0.0 && cfg.missing_rate < 1.0) ||
      !(cfg.persistence >= 0.0 && cfg.persistence <= 1.0)) {
    throw InvalidSpec("synth missing_rate must lie in [0,1) and persistence in [0,1]");
  }
  const FeatureSchema& schema = cfg.schema.features;
  const RatingScale& scale = cfg.schema.rating_scale;
  const auto& dims = schema.dimensions();

  Rng factor_rng(mix_seed(cfg.seed, 1));
  Rng context_rng(mix_seed(cfg.seed, 2));
  Rng event_rng(mix_seed(cfg.seed, 3));
  Rng noise_rng(mix_seed(cfg.seed, 4));

  // Latent user/item factors scaled so the affinity has sd ~ affinity_sd.
  const double factor_sd =
      std::pow(cfg.affinity_sd * cfg.affinity_sd / static_cast<double>(cfg.latent_rank), 0.25);
  std::vector<double> user_factor(cfg.n_users * cfg.latent_rank);
  std::vector<double> item_factor(cfg.n_items * cfg.latent_rank);
  std::vector<double> user_bias(cfg.n_users);
  std::vector<double> item_bias(cfg.n_items);
  for (auto& v : user_factor) v = factor_rng.normal(0.0, factor_sd);
  for (auto& v : item_factor) v = factor_rng.normal(0.0, factor_sd);
  for (auto& v : user_bias) v = factor_rng.normal(0.0, cfg.bias_sd);
  for (auto& v : item_bias) v = factor_rng.normal(0.0, cfg.bias_sd);

  // Category popularity per nominal dimension and the context read-out.
  std::vector<std::vector<double>> category_cdf(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k].kind != DimensionKind::kNominal) continue;
    double total = 0.0;
    for (std::size_t c = 0; c < dims[k].categories.size(); ++c) {
      total += 0.5 + context_rng.uniform();
      category_cdf[k].push_back(total);
    }
    for (auto& p : category_cdf[k]) p /= total;
  }
  std::vector<double> readout(schema.width());
  for (auto& w : readout) w = context_rng.normal();

  const std::size_t n = cfg.n_interactions;
  std::vector<RawInteraction> rows(n);
  std::vector<std::optional<ContextValue>> state(dims.size());
  double clock = static_cast<double>(cfg.start_time);
  for (std::size_t i = 0; i < n; ++i) {
    RawInteraction& r = rows[i];
    clock += 1.0 + event_rng.uniform() * 2.0 * cfg.mean_gap_seconds;
    r.timestamp = static_cast<std::int64_t>(clock);
    r.user_id = "u" + std::to_string(event_rng.below(cfg.n_users));
    r.item_id = "i" + std::to_string(event_rng.below(cfg.n_items));
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const bool keep = i > 0 && context_rng.uniform() < cfg.persistence;
      if (!keep) {
        if (dims[k].kind == DimensionKind::kNominal) {
          const double u = context_rng.uniform();
          const auto& cdf = category_cdf[k];
          std::size_t c = static_cast<std::size_t>(
              std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
          c = std::min(c, cdf.size() - 1);
          state[k] = ContextValue{dims[k].categories[c]};
        } else {
          state[k] = ContextValue{context_rng.uniform(dims[k].min, dims[k].max)};
        }
      }
      r.context.push_back(state[k]);
    }
    for (auto& cell : r.context) {
      if (cfg.missing_rate > 0.0 && context_rng.uniform() < cfg.missing_rate) cell.reset();
    }
  }

  // Context term from the trailing window of observed (binarized) context.
  std::vector<double> raw_term(n, 0.0);
  if (cfg.signal_horizon > 0) {
    std::vector<double> projection(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = binarize(rows[i], schema);
      double acc = 0.0;
      for (std::size_t c = 0; c < v.values.size(); ++c) acc += readout[c] * v.values[c];
      projection[i] = acc;
    }
    double window_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      window_sum += projection[i];
      if (i >= cfg.signal_horizon) window_sum -= projection[i - cfg.signal_horizon];
      const std::size_t len = std::min(i + 1, cfg.signal_horizon);
      raw_term[i] = window_sum / static_cast<double>(len);
    }
    double mean = 0.0;
    for (double t : raw_term) mean += t;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double t : raw_term) var += (t - mean) * (t - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (double& t : raw_term) t = sd > 0.0 ? (t - mean) / sd * cfg.context_effect : 0.0;
  }

  SynthOutput out;
  out.expected_rating.resize(n);
  out.context_term = raw_term;
  for (std::size_t i = 0; i < n; ++i) {
    RawInteraction& r = rows[i];
    const std::size_t u = std::stoul(r.user_id.substr(1));
    const std::size_t it = std::stoul(r.item_id.substr(1));
    double affinity = 0.0;
    for (std::size_t f = 0; f < cfg.latent_rank; ++f) {
      affinity += user_factor[u * cfg.latent_rank + f] * item_factor[it * cfg.latent_rank + f];
    }
    const double expected = scale.midpoint() + user_bias[u] + item_bias[it] + affinity + raw_term[i];
    out.expected_rating[i] = expected;
    double rating = std::clamp(expected + noise_rng.normal(0.0, cfg.noise_sd), scale.min, scale.max);
    if (!scale.levels.empty()) {
      rating = *std::min_element(scale.levels.begin(), scale.levels.end(),
                                 [&](double a, double b) {
                                   return std::abs(a - rating) < std::abs(b - rating);
                                 });
    }
    r.rating = rating;
  }
  // Timestamps are strictly increasing, so construction keeps this order.
  out.dataset = Dataset(schema, std::move(rows), scale);
  return out;
}

Dataset synth_dataset(const SynthConfig& config) { return synthesize(config).dataset; }

}  // namespace ctxrec::data
