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
#include "ctxrec/data/schema.hpp"

namespace ctxrec::data {
namespace {

Dimension nominal(std::string name, std::vector<std::string> cats) {
  return {std::move(name), DimensionKind::kNominal, std::move(cats), 0.0, 1.0};
}

Dimension numeric(std::string name, double lo, double hi) {
  return {std::move(name), DimensionKind::kNumeric, {}, lo, hi};
}

TEST(FeatureSchema, WidthAndOffsets) {
  const FeatureSchema s({nominal("time", {"morning", "noon", "night"}), numeric("light", 0, 1),
                         nominal("weather", {"sun", "rain"})});
  EXPECT_EQ(s.width(), 6u);
  EXPECT_EQ(s.column_offset(0), 0u);
  EXPECT_EQ(s.column_offset(1), 3u);
  EXPECT_EQ(s.column_offset(2), 4u);
  EXPECT_EQ(*s.find("weather"), 2u);
  EXPECT_FALSE(s.find("sound").has_value());
  const std::vector<std::string> names = {"time=morning", "time=noon", "time=night",
                                          "light",        "weather=sun", "weather=rain"};
  EXPECT_EQ(s.column_names(), names);
}

TEST(FeatureSchema, RejectsInvalidDefinitions) {
  EXPECT_THROW(FeatureSchema({nominal("a", {"x"}), nominal("a", {"y"})}), InvalidSpec);
  EXPECT_THROW(FeatureSchema({nominal("a", {})}), InvalidSpec);
  EXPECT_THROW(FeatureSchema({nominal("a", {"x", "x"})}), InvalidSpec);
  EXPECT_THROW(FeatureSchema({numeric("n", 1.0, 1.0)}), InvalidSpec);
}

TEST(FeatureSchema, FingerprintTracksContent) {
  const FeatureSchema a({nominal("t", {"x", "y"})});
  const FeatureSchema b({nominal("t", {"x", "y"})});
  const FeatureSchema c({nominal("t", {"y", "x"})});
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(RatingScale, LevelsAndRange) {
  RatingScale cars{1.0, 5.0, {1.0, 3.0, 5.0}, {{"dislike", 1.0}, {"like", 3.0}, {"check-in", 5.0}}};
  EXPECT_TRUE(cars.contains(3.0));
  EXPECT_FALSE(cars.contains(2.0));
  RatingScale yelp;
  EXPECT_TRUE(yelp.contains(2.5));
  EXPECT_FALSE(yelp.contains(5.5));
  EXPECT_DOUBLE_EQ(yelp.midpoint(), 3.0);
}

TEST(SchemaFile, JsonRoundTrip) {
  SchemaDocument doc{FeatureSchema({nominal("time", {"am", "pm"}), numeric("battery", 0, 100)}),
                     RatingScale{1.0, 5.0, {1.0, 3.0, 5.0}, {{"like", 3.0}}}};
  const std::string path = ::testing::TempDir() + "/schema_test.json";
  save_schema(path, doc);
  const auto back = load_schema(path);
  EXPECT_EQ(back.features.fingerprint(), doc.features.fingerprint());
  EXPECT_EQ(back.features.dimensions()[1].max, 100.0);
  EXPECT_EQ(back.rating_scale.levels, doc.rating_scale.levels);
  EXPECT_EQ(back.rating_scale.labels.at("like"), 3.0);
  EXPECT_EQ(schema_to_json(back), schema_to_json(doc));
}

TEST(SchemaFile, MalformedDocumentsRejected) {
  using nlohmann::json;
  EXPECT_THROW(schema_from_json(json::parse(R"({"dimensions":[{"name":"a","kind":"ordinal"}]})")),
               Error);
  EXPECT_THROW(schema_from_json(json::parse(R"({"dims":[]})")), Error);
  EXPECT_THROW(load_schema(::testing::TempDir() + "/does_not_exist.json"), FileNotFound);
}

}  // namespace
}  // namespace ctxrec::data
