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

#include "ctxrec/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "ctxrec/common/errors.hpp"

namespace ctxrec::eval {
namespace {

void check_pair(std::span<const double> preds, std::span<const double> targets) {
  if (preds.size() != targets.size()) {
    throw ShapeMismatch(std::to_string(preds.size()) + " predictions vs " +
                        std::to_string(targets.size()) + " targets");
  }
  if (preds.empty()) throw EmptyInput("metric over zero samples");
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double rmse(std::span<const double> preds, std::span<const double> targets) {
  check_pair(preds, targets);
  double acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i] - targets[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(preds.size()));
}

double mae(std::span<const double> preds, std::span<const double> targets) {
  check_pair(preds, targets);
  double acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) acc += std::abs(preds[i] - targets[i]);
  return acc / static_cast<double>(preds.size());
}

std::size_t positive_rank(const CandidateSet& candidates, std::span<const double> scores,
                          const nn::Vocabulary& items) {
  if (scores.size() != candidates.items.size()) {
    throw ShapeMismatch("one score per candidate required");
  }
  const auto it = std::find(candidates.items.begin(), candidates.items.end(), candidates.positive);
  if (it == candidates.items.end()) {
    throw PositiveNotInCandidates("item index " + std::to_string(candidates.positive));
  }
  const std::size_t pos = static_cast<std::size_t>(it - candidates.items.begin());
  const double s = scores[pos];
  const std::string& pos_id = items.id(candidates.positive);
  std::size_t ahead = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (j == pos) continue;
    if (scores[j] > s || (scores[j] == s && items.id(candidates.items[j]) < pos_id)) ++ahead;
  }
  return ahead + 1;
}

int hit_at_k(const rec::NeuMfModel& model, std::size_t user, std::span<const double> context,
             const CandidateSet& candidates, std::size_t k) {
  if (k == 0) throw InvalidConfig("k must be at least 1");
  std::vector<double> scores(candidates.items.size());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    scores[j] = model.predict(user, candidates.items[j], context);
  }
  return positive_rank(candidates, scores, model.items()) <= k ? 1 : 0;
}

SampledCandidatePolicy::SampledCandidatePolicy(std::size_t n_items,
                                               std::vector<std::vector<std::size_t>> rated_by_user,
                                               std::size_t n_negatives)
    : n_items_(n_items), rated_(std::move(rated_by_user)), n_negatives_(n_negatives) {
  for (auto& r : rated_) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
}

CandidateSet SampledCandidatePolicy::candidates(std::size_t user, std::size_t positive,
                                                Rng& rng) const {
  CandidateSet set;
  set.positive = positive;
  set.items.push_back(positive);
  static const std::vector<std::size_t> kNone;
  const auto& rated = user < rated_.size() ? rated_[user] : kNone;
  auto excluded = [&](std::size_t item) {
    return item == positive || std::binary_search(rated.begin(), rated.end(), item);
  };
  std::vector<std::size_t> pool;
  pool.reserve(n_items_);
  for (std::size_t i = 0; i < n_items_; ++i) {
    if (!excluded(i)) pool.push_back(i);
  }
  const std::size_t take = std::min(n_negatives_, pool.size());
  for (std::size_t j = 0; j < take; ++j) {
    const std::size_t pick = j + static_cast<std::size_t>(rng.below(pool.size() - j));
    std::swap(pool[j], pool[pick]);
    set.items.push_back(pool[j]);
  }
  return set;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["rmse"] = rmse;
  j["mae"] = mae;
  nlohmann::json h = nlohmann::json::object();
  for (const auto& [k, v] : hits) h["hit@" + std::to_string(k)] = v;
  j["hits"] = h;
  j["n_test"] = n_test;
  j["n_ranked"] = n_ranked;
  j["n_skipped"] = n_skipped;
  return j;
}

std::string EvalReport::csv_header() const {
  std::string s = "rmse,mae";
  for (const auto& [k, v] : hits) s += ",hit@" + std::to_string(k);
  s += ",n_test,n_ranked,n_skipped";
  return s;
}

std::string EvalReport::csv_row() const {
  std::string s = format_metric(rmse) + "," + format_metric(mae);
  for (const auto& [k, v] : hits) s += "," + format_metric(v);
  s += "," + std::to_string(n_test) + "," + std::to_string(n_ranked) + "," + std::to_string(n_skipped);
  return s;
}

}  // namespace ctxrec::eval
