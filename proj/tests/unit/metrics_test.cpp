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

#include <algorithm>
#include <set>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/eval/metrics.hpp"

namespace ctxrec::eval {
namespace {

TEST(Metrics, KnownValues) {
  const std::vector<double> p = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> t = {2.0, 2.0, 1.0, 4.0};
  EXPECT_DOUBLE_EQ(rmse(p, t), std::sqrt(5.0 / 4.0));
  EXPECT_DOUBLE_EQ(mae(p, t), 3.0 / 4.0);
  EXPECT_EQ(rmse(p, p), 0.0);
  EXPECT_THROW(rmse({}, {}), EmptyInput);
  EXPECT_THROW(mae(p, std::vector<double>{1.0}), ShapeMismatch);
}

nn::Vocabulary items(std::initializer_list<const char*> ids) {
  nn::Vocabulary v;
  for (const char* id : ids) v.add(id);
  return v;
}

TEST(PositiveRank, CountsStrictlyBetterAndTieBreaksById) {
  const auto vocab = items({"c", "a", "b", "d"});
  CandidateSet set{0, {0, 1, 2, 3}};
  EXPECT_EQ(positive_rank(set, std::vector<double>{0.9, 0.1, 0.2, 0.3}, vocab), 1u);
  EXPECT_EQ(positive_rank(set, std::vector<double>{0.2, 0.5, 0.1, 0.3}, vocab), 3u);
  // "c" ties with "a" and "b": both sort first.
  EXPECT_EQ(positive_rank(set, std::vector<double>{0.5, 0.5, 0.5, 0.1}, vocab), 3u);
  set.positive = 1;
  EXPECT_EQ(positive_rank(set, std::vector<double>{0.5, 0.5, 0.5, 0.1}, vocab), 1u);
  set.positive = 9;
  EXPECT_THROW(positive_rank(set, std::vector<double>{0.5, 0.5, 0.5, 0.1}, vocab),
               PositiveNotInCandidates);
  EXPECT_THROW(positive_rank(set, std::vector<double>{0.5}, vocab), ShapeMismatch);
}

TEST(SampledCandidates, ExcludesRatedItemsAndIsSeeded) {
  std::vector<std::vector<std::size_t>> rated = {{1, 2, 3, 3}, {}};
  const SampledCandidatePolicy policy(200, rated, 99);
  Rng rng(5);
  const auto set = policy.candidates(0, 2, rng);
  EXPECT_EQ(set.items.size(), 100u);
  EXPECT_EQ(set.positive, 2u);
  const std::set<std::size_t> unique(set.items.begin(), set.items.end());
  EXPECT_EQ(unique.size(), 100u);
  EXPECT_EQ(std::count(set.items.begin(), set.items.end(), 1u), 0);
  EXPECT_EQ(std::count(set.items.begin(), set.items.end(), 3u), 0);
  Rng again(5);
  EXPECT_EQ(policy.candidates(0, 2, again).items, set.items);
}

TEST(SampledCandidates, SmallCatalogueTakesWhatIsLeft) {
  const SampledCandidatePolicy policy(10, {{0, 1, 2}}, 99);
  Rng rng(1);
  EXPECT_EQ(policy.candidates(0, 0, rng).items.size(), 1u + 7u);
}

TEST(FunctionCandidates, DelegatesToFunction) {
  const FunctionCandidatePolicy policy([](std::size_t, std::size_t pos, Rng&) {
    return CandidateSet{pos, {pos, 7}};
  });
  Rng rng(1);
  EXPECT_EQ(policy.candidates(0, 3, rng).items, (std::vector<std::size_t>{3, 7}));
}

TEST(EvalReport, JsonAndCsv) {
  EvalReport r;
  r.rmse = 0.5;
  r.mae = 0.25;
  r.hits = {{1, 0.1}, {5, 0.3}};
  r.n_test = 10;
  r.n_ranked = 8;
  r.n_skipped = 2;
  const auto j = r.to_json();
  EXPECT_EQ(j.at("rmse"), 0.5);
  EXPECT_EQ(j.at("hits").at("hit@5"), 0.3);
  EXPECT_EQ(j.at("n_skipped"), 2);
  EXPECT_EQ(r.csv_header(), "rmse,mae,hit@1,hit@5,n_test,n_ranked,n_skipped");
  EXPECT_EQ(r.csv_row(), "0.5,0.25,0.10000000000000001,0.29999999999999999,10,8,2");
}

}  // namespace
}  // namespace ctxrec::eval
