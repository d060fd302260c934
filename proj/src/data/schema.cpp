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

#include "ctxrec/data/schema.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/hash.hpp"

namespace ctxrec::data {

using nlohmann::json;

FeatureSchema::FeatureSchema(std::vector<Dimension> dimensions)
    : dimensions_(std::move(dimensions)) {
  std::set<std::string> names;
  for (const auto& d : dimensions_) {
    if (d.name.empty()) throw InvalidSpec("dimension with empty name");
    if (!names.insert(d.name).second) throw InvalidSpec("duplicate dimension '" + d.name + "'");
    if (d.kind == DimensionKind::kNominal) {
      if (d.categories.empty()) throw InvalidSpec("nominal dimension '" + d.name + "' has no categories");
      std::set<std::string> cats(d.categories.begin(), d.categories.end());
      if (cats.size() != d.categories.size()) {
        throw InvalidSpec("duplicate category in dimension '" + d.name + "'");
      }
    } else if (!(d.min < d.max)) {
      throw InvalidSpec("numeric dimension '" + d.name + "' needs min < max");
    }
    offsets_.push_back(width_);
    width_ += d.width();
  }
}

std::optional<std::size_t> FeatureSchema::find(const std::string& name) const {
  for (std::size_t i = 0; i < dimensions_.size(); ++i) {
    if (dimensions_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> FeatureSchema::column_names() const {
  std::vector<std::string> names;
  names.reserve(width_);
  for (const auto& d : dimensions_) {
    if (d.kind == DimensionKind::kNominal) {
      for (const auto& c : d.categories) names.push_back(d.name + "=" + c);
    } else {
      names.push_back(d.name);
    }
  }
  return names;
}

std::uint64_t FeatureSchema::fingerprint() const {
  SchemaDocument doc{*this, RatingScale{}};
  return fnv1a(schema_to_json(doc)["dimensions"].dump());
}

bool RatingScale::contains(double rating) const {
  if (!std::isfinite(rating) || rating < min || rating > max) return false;
  if (levels.empty()) return true;
  return std::find(levels.begin(), levels.end(), rating) != levels.end();
}

json schema_to_json(const SchemaDocument& doc) {
  json dims = json::array();
  for (const auto& d : doc.features.dimensions()) {
    json jd;
    jd["name"] = d.name;
    if (d.kind == DimensionKind::kNominal) {
      jd["kind"] = "nominal";
      jd["categories"] = d.categories;
    } else {
      jd["kind"] = "numeric";
      jd["min"] = d.min;
      jd["max"] = d.max;
    }
    dims.push_back(std::move(jd));
  }
  json scale;
  scale["min"] = doc.rating_scale.min;
  scale["max"] = doc.rating_scale.max;
  if (!doc.rating_scale.levels.empty()) scale["levels"] = doc.rating_scale.levels;
  if (!doc.rating_scale.labels.empty()) scale["labels"] = doc.rating_scale.labels;
  json j;
  j["dimensions"] = std::move(dims);
  j["rating_scale"] = std::move(scale);
  return j;
}

SchemaDocument schema_from_json(const json& j) {
  try {
    std::vector<Dimension> dims;
    for (const auto& jd : j.at("dimensions")) {
      Dimension d;
      d.name = jd.at("name").get<std::string>();
      const auto kind = jd.at("kind").get<std::string>();
      if (kind == "nominal") {
        d.kind = DimensionKind::kNominal;
        d.categories = jd.at("categories").get<std::vector<std::string>>();
      } else if (kind == "numeric") {
        d.kind = DimensionKind::kNumeric;
        d.min = jd.value("min", 0.0);
        d.max = jd.value("max", 1.0);
      } else {
        throw InvalidSpec("dimension '" + d.name + "' has unknown kind '" + kind + "'");
      }
      dims.push_back(std::move(d));
    }
    SchemaDocument doc{FeatureSchema(std::move(dims)), RatingScale{}};
    if (j.contains("rating_scale")) {
      const auto& js = j.at("rating_scale");
      doc.rating_scale.min = js.value("min", 1.0);
      doc.rating_scale.max = js.value("max", 5.0);
      if (js.contains("levels")) doc.rating_scale.levels = js.at("levels").get<std::vector<double>>();
      if (js.contains("labels")) {
        doc.rating_scale.labels = js.at("labels").get<std::map<std::string, double>>();
      }
      if (!(doc.rating_scale.min < doc.rating_scale.max)) {
        throw InvalidSpec("rating_scale needs min < max");
      }
    }
    return doc;
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("malformed schema: ") + e.what());
  }
}

SchemaDocument load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidSpec(path + ": " + e.what());
  }
  return schema_from_json(j);
}

void save_schema(const std::string& path, const SchemaDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << schema_to_json(doc).dump(2) << '\n';
}

}  // namespace ctxrec::data
