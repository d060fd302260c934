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
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctxrec/data/schema.hpp"

namespace ctxrec::data {

/// Raw value of one context dimension: category label or real number.
using ContextValue = std::variant<std::string, double>;

/// One timestamped rating with raw context, aligned to the schema's
/// dimension order. std::nullopt marks a missing cell.
struct RawInteraction {
  std::int64_t timestamp = 0;
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
  std::vector<std::optional<ContextValue>> context;
};

/// Binarized context of one interaction; every entry lies in [0, 1].
struct ContextVector {
  std::vector<double> values;
  std::int64_t timestamp = 0;
};

/// L consecutive context vectors in time order.
struct ContextSequence {
  std::vector<ContextVector> vectors;
  std::size_t length() const { return vectors.size(); }
};

/// Immutable, timestamp-ordered collection of interactions. Construction
/// stable-sorts by timestamp, so equal timestamps keep input order.
class Dataset {
 public:
  Dataset() = default;
  Dataset(FeatureSchema schema, std::vector<RawInteraction> interactions,
          RatingScale rating_scale);

  const FeatureSchema& schema() const { return schema_; }
  const RatingScale& rating_scale() const { return rating_scale_; }
  const std::vector<RawInteraction>& interactions() const { return interactions_; }
  std::size_t size() const { return interactions_.size(); }
  bool empty() const { return interactions_.empty(); }
  const RawInteraction& operator[](std::size_t i) const { return interactions_[i]; }

  /// Interactions [begin, end) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;

 private:
  FeatureSchema schema_;
  std::vector<RawInteraction> interactions_;
  RatingScale rating_scale_;
};

struct CsvFormat {
  char delimiter = ',';
  /// When set, a file without a rating column is accepted (ratings become the
  /// scale midpoint), as is one without timestamps (row order is used).
  bool prediction_input = false;
};

/// Reads `timestamp,user_id,item_id,rating,<dims...>` (columns in any order).
/// Timestamps are integer epoch seconds or ISO-8601, detected from the first
/// data row and required to be uniform across the file. Ratings may be
/// numbers or labels declared in the rating scale. Empty context cells are
/// recorded as missing.
Dataset load_interactions(const std::string& path, const SchemaDocument& schema,
                          const CsvFormat& format = {});
Dataset read_interactions(std::istream& in, const SchemaDocument& schema,
                          const CsvFormat& format = {}, const std::string& source = "<stream>");

/// Writes a dataset in the format load_interactions reads (epoch timestamps,
/// round-trip precision for reals).
void write_interactions(std::ostream& out, const Dataset& ds);
void save_interactions(const std::string& path, const Dataset& ds);

/// Parses "YYYY-MM-DD[THH:MM:SS[.fff]][Z|+HH:MM]" (a space may replace 'T').
std::optional<std::int64_t> parse_iso8601(const std::string& text);

/// One-hot / min-max encoding. Missing nominal values yield an all-zero
/// group; missing numeric values yield 0; numeric values clamp to [0, 1].
/// Throws UnknownCategory for a category not in the schema.
ContextVector binarize(const RawInteraction& raw, const FeatureSchema& schema);
std::vector<ContextVector> binarize_all(const Dataset& ds);

/// Category whose column is set in dimension `dim`'s one-hot group, or
/// nullopt when the group is all zero.
std::optional<std::string> decode_nominal(const ContextVector& v, const FeatureSchema& schema,
                                          std::size_t dim);

/// First ceil(train_fraction * n) interactions form the training split.
/// Throws EmptyDataset, or DegenerateSplit when either side would be empty.
std::pair<Dataset, Dataset> time_split(const Dataset& ds, double train_fraction);

/// Sliding windows of length L with stride 1 over time-ordered vectors;
/// returns max(0, n - L + 1) sequences. User ids play no part.
std::vector<ContextSequence> generate_sequences(const std::vector<ContextVector>& vectors,
                                                std::size_t length);
std::vector<ContextSequence> generate_sequences(const Dataset& ds, std::size_t length);

}  // namespace ctxrec::data
