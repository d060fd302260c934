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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace ctxrec::data {

enum class DimensionKind { kNominal, kNumeric };

/// One context dimension. Nominal dimensions expand to one binary column per
/// category; numeric dimensions occupy one column scaled from [min, max]
/// to [0, 1].
struct Dimension {
  std::string name;
  DimensionKind kind = DimensionKind::kNominal;
  std::vector<std::string> categories;
  double min = 0.0;
  double max = 1.0;

  std::size_t width() const { return kind == DimensionKind::kNominal ? categories.size() : 1; }
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  /// Validates unique dimension names, unique categories within a
  /// dimension, non-empty category lists and min < max. Throws InvalidSpec.
  explicit FeatureSchema(std::vector<Dimension> dimensions);

  const std::vector<Dimension>& dimensions() const { return dimensions_; }
  std::size_t width() const { return width_; }
  std::optional<std::size_t> find(const std::string& name) const;

  /// First binarized column of dimension `index`.
  std::size_t column_offset(std::size_t index) const { return offsets_.at(index); }

  /// "dim=category" for nominal columns, the dimension name for numeric ones.
  std::vector<std::string> column_names() const;

  /// Stable 64-bit fingerprint of the canonical JSON form.
  std::uint64_t fingerprint() const;

 private:
  std::vector<Dimension> dimensions_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
};

/// Declared range of ratings; optional discrete levels and textual labels
/// (e.g. dislike=1, like=3, check-in=5).
struct RatingScale {
  double min = 1.0;
  double max = 5.0;
  std::vector<double> levels;
  std::map<std::string, double> labels;

  bool contains(double rating) const;
  double midpoint() const { return 0.5 * (min + max); }
};

/// Contents of a schema file: context dimensions plus the rating scale.
struct SchemaDocument {
  FeatureSchema features;
  RatingScale rating_scale;
};

nlohmann::json schema_to_json(const SchemaDocument& doc);
SchemaDocument schema_from_json(const nlohmann::json& j);
SchemaDocument load_schema(const std::string& path);
void save_schema(const std::string& path, const SchemaDocument& doc);

}  // namespace ctxrec::data
