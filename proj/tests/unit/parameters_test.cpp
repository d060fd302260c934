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

#include <bit>
#include <cmath>
#include <sstream>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/nn/model_file.hpp"
#include "ctxrec/nn/parameters.hpp"

namespace ctxrec::nn {
namespace {

ParameterSet make_set() {
  ParameterSet ps;
  ps.add("a.weight", {3, 4}, InitRule::uniform_fan_in(4));
  ps.add("a.bias", {3});
  ps.add("emb.table", {5, 2}, InitRule::normal(0.01));
  return ps;
}

TEST(ParameterSet, LayoutIsContiguousInRegistrationOrder) {
  const auto ps = make_set();
  EXPECT_EQ(ps.size(), 12u + 3u + 10u);
  EXPECT_EQ(ps.info("a.bias").offset, 12u);
  EXPECT_EQ(ps.info("emb.table").offset, 15u);
  EXPECT_EQ(ps.owner_of(14).name, "a.bias");
  EXPECT_EQ(ps.owner_of(15).name, "emb.table");
  EXPECT_THROW(ps.info("nope"), std::exception);
}

TEST(ParameterSet, DuplicateNameRejected) {
  ParameterSet ps;
  ps.add("x", {2});
  EXPECT_THROW(ps.add("x", {3}), InvalidConfig);
}

TEST(ParameterSet, InitializationFollowsRules) {
  auto ps = make_set();
  ps.initialize(42);
  for (double w : ps.tensor("a.weight")) EXPECT_LE(std::abs(w), 0.5);
  for (double b : ps.tensor("a.bias")) EXPECT_EQ(b, 0.0);
  for (double e : ps.tensor("emb.table")) EXPECT_LT(std::abs(e), 0.1);
}

// Init of one tensor must not depend on what else was registered.
TEST(ParameterSet, InitializationIsPerTensor) {
  auto full = make_set();
  full.initialize(5);
  ParameterSet alone;
  alone.add("emb.table", {5, 2}, InitRule::normal(0.01));
  alone.initialize(5);
  const auto a = full.tensor("emb.table");
  const auto b = alone.tensor("emb.table");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);

  auto other = make_set();
  other.initialize(6);
  EXPECT_NE(other.tensor("a.weight")[0], full.tensor("a.weight")[0]);
}

TEST(ParameterContainer, RoundTripIsBitExact) {
  auto ps = make_set();
  ps.initialize(3);
  ps.values()[0] = -0.0;
  ps.values()[1] = 1e-310;  // subnormal
  ps.values()[2] = std::nextafter(1.0, 2.0);
  std::stringstream buf;
  write_parameters(buf, ps);
  const auto back = read_parameters(buf);
  ASSERT_TRUE(back.same_layout(ps));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.values()[i]),
              std::bit_cast<std::uint64_t>(ps.values()[i]));
  }
  std::stringstream again;
  write_parameters(again, back);
  std::stringstream first;
  write_parameters(first, ps);
  EXPECT_EQ(again.str(), first.str());
}

TEST(ParameterContainer, RejectsCorruptInput) {
  auto ps = make_set();
  std::stringstream buf;
  write_parameters(buf, ps);
  std::string bytes = buf.str();

  std::stringstream bad_magic(std::string("NOTPARAM") + bytes.substr(8));
  EXPECT_THROW(read_parameters(bad_magic), ParseError);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(read_parameters(truncated), Error);

  std::string future = bytes;
  future[8] = 99;
  std::stringstream bad_version(future);
  EXPECT_THROW(read_parameters(bad_version), ParseError);
}

TEST(ParameterContainer, LoadValuesChecksLayout) {
  auto a = make_set();
  a.initialize(1);
  auto b = make_set();
  load_values(b, a);
  EXPECT_EQ(b.values()[3], a.values()[3]);
  ParameterSet c;
  c.add("a.weight", {4, 3});
  EXPECT_THROW(load_values(c, a), ShapeMismatch);
}

TEST(ModelFile, HeaderAndParametersRoundTrip) {
  auto ps = make_set();
  ps.initialize(11);
  const std::string path = ::testing::TempDir() + "/model_file_test.model";
  write_model_file(path, {{"kind", "test"}, {"widths", {3, 4}}}, ps);
  const auto back = read_model_file(path);
  EXPECT_EQ(back.header.at("kind"), "test");
  EXPECT_EQ(back.header.at("widths"), nlohmann::json({3, 4}));
  ASSERT_TRUE(back.params.same_layout(ps));
  for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(back.params.values()[i], ps.values()[i]);
  EXPECT_EQ(file_digest(path).size(), 16u);
  EXPECT_THROW(read_model_file(path + ".missing"), FileNotFound);
}

}  // namespace
}  // namespace ctxrec::nn
