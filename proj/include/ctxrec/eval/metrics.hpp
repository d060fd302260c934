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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ctxrec/common/random.hpp"
#include "ctxrec/nn/layers.hpp"
#include "ctxrec/rec/neumf.hpp"
#include "json.hpp"

namespace ctxrec::eval {

/// Throws EmptyInput / ShapeMismatch.
double rmse(std::span<const double> preds, std::span<const double> targets);
double mae(std::span<const double> preds, std::span<const double> targets);

/// Items to rank for one test interaction. `items` holds vocabulary indices,
/// is duplicate-free and contains `positive`.
struct CandidateSet {
  std::size_t positive = 0;
  std::vector<std::size_t> items;
};

/// 1-based rank of the positive among `scores` (aligned with
/// candidates.items), sorting by score descending and breaking ties by item
/// id ascending. Throws PositiveNotInCandidates.
std::size_t positive_rank(const CandidateSet& candidates, std::span<const double> scores,
                          const nn::Vocabulary& items);

/// Scores every candidate with `model` under `context`; 1 when the positive
/// ranks within the top k.
int hit_at_k(const rec::NeuMfModel& model, std::size_t user, std::span<const double> context,
             const CandidateSet& candidates, std::size_t k);

/// Supplies the candidate list for a test interaction.
class CandidatePolicy {
 public:
  virtual ~CandidatePolicy() = default;
  virtual CandidateSet candidates(std::size_t user, std::size_t positive, Rng& rng) const = 0;
};

/// Positive plus up to `n_negatives` items drawn uniformly without
/// replacement from the items the user never rated.
class SampledCandidatePolicy : public CandidatePolicy {
 public:
  SampledCandidatePolicy(std::size_t n_items, std::vector<std::vector<std::size_t>> rated_by_user,
                         std::size_t n_negatives = 99);
  CandidateSet candidates(std::size_t user, std::size_t positive, Rng& rng) const override;

 private:
  std::size_t n_items_;
  std::vector<std::vector<std::size_t>> rated_;  // sorted per user
  std::size_t n_negatives_;
};

/// Adapter for externally computed lists (e.g. items within a radius of the
/// user's position).
class FunctionCandidatePolicy : public CandidatePolicy {
 public:
  using Fn = std::function<CandidateSet(std::size_t user, std::size_t positive, Rng& rng)>;
  explicit FunctionCandidatePolicy(Fn fn) : fn_(std::move(fn)) {}
  CandidateSet candidates(std::size_t user, std::size_t positive, Rng& rng) const override {
    return fn_(user, positive, rng);
  }

 private:
  Fn fn_;
};

struct EvalReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::map<std::size_t, double> hits;
  std::size_t n_test = 0;
  /// Test rows with a positive rating that were ranked.
  std::size_t n_ranked = 0;
  /// Test interactions with a user or item unseen in training.
  std::size_t n_skipped = 0;

  nlohmann::json to_json() const;
  std::string csv_header() const;
  std::string csv_row() const;
};

}  // namespace ctxrec::eval
