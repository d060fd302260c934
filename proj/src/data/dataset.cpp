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

#include "ctxrec/data/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctxrec/common/errors.hpp"

namespace ctxrec::data {
namespace {

constexpr const char* kMandatory[] = {"timestamp", "user_id", "item_id", "rating"};

std::vector<std::string> split_csv_line(const std::string& line, char delim,
                                        std::size_t row, const std::string& source) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delim) {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw ParseError(source + ": row " + std::to_string(row) + ": unterminated quote");
  cells.push_back(std::move(cur));
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  try {
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool is_integer_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

std::string quote_cell(const std::string& s, char delim) {
  if (s.find_first_of(std::string("\"\n\r") + delim) == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset::Dataset(FeatureSchema schema, std::vector<RawInteraction> interactions,
                 RatingScale rating_scale)
    : schema_(std::move(schema)),
      interactions_(std::move(interactions)),
      rating_scale_(std::move(rating_scale)) {
  std::stable_sort(interactions_.begin(), interactions_.end(),
                   [](const RawInteraction& a, const RawInteraction& b) {
                     return a.timestamp < b.timestamp;
                   });
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, interactions_.size());
  begin = std::min(begin, end);
  return Dataset(schema_,
                 std::vector<RawInteraction>(interactions_.begin() + static_cast<std::ptrdiff_t>(begin),
                                             interactions_.begin() + static_cast<std::ptrdiff_t>(end)),
                 rating_scale_);
}

std::optional<std::int64_t> parse_iso8601(const std::string& text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 || consumed != 10) {
    return std::nullopt;
  }
  std::size_t pos = 10;
  std::int64_t offset_seconds = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
    ++pos;
    int n = 0;
    if (std::sscanf(text.c_str() + pos, "%2d:%2d:%2d%n", &h, &mi, &s, &n) != 3 || n != 8) {
      return std::nullopt;
    }
    pos += 8;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size()) {
      if (text[pos] == 'Z' && pos + 1 == text.size()) {
        pos = text.size();
      } else if (text[pos] == '+' || text[pos] == '-') {
        int oh = 0, om = 0;
        if (std::sscanf(text.c_str() + pos + 1, "%2d:%2d%n", &oh, &om, &n) != 2 || n != 5 ||
            pos + 6 != text.size()) {
          return std::nullopt;
        }
        offset_seconds = (text[pos] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
        pos = text.size();
      } else {
        return std::nullopt;
      }
    }
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days_since_epoch) * 86400 + h * 3600 + mi * 60 + s -
         offset_seconds;
}

Dataset read_interactions(std::istream& in, const SchemaDocument& doc, const CsvFormat& format,
                          const std::string& source) {
  const FeatureSchema& schema = doc.features;
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaMismatch(source + ": missing header row");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  auto header = split_csv_line(line, format.delimiter, 1, source);
  for (auto& h : header) h = trim(h);

  std::vector<std::string> expected(std::begin(kMandatory), std::end(kMandatory));
  for (const auto& d : schema.dimensions()) expected.push_back(d.name);
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  const auto has_column = [&](const std::string& name) {
    return std::count(header.begin(), header.end(), name) > 0;
  };
  const bool has_ts = has_column("timestamp") || !format.prediction_input;
  const bool has_rating = has_column("rating") || !format.prediction_input;
  if (!has_ts) std::erase(expected, std::string("timestamp"));
  if (!has_rating) std::erase(expected, std::string("rating"));
  for (const auto& e : expected) {
    if (!has_column(e)) missing.push_back(e);
  }
  for (const auto& h : header) {
    if (std::count(expected.begin(), expected.end(), h) != 1 ||
        std::count(header.begin(), header.end(), h) != 1) {
      extra.push_back(h);
    }
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = source + ": header does not match schema;";
    if (!missing.empty()) {
      msg += " missing:";
      for (const auto& m : missing) msg += " " + m;
    }
    if (!extra.empty()) {
      msg += " unexpected:";
      for (const auto& x : extra) msg += " " + x;
    }
    throw SchemaMismatch(msg);
  }

  auto column_of = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  const std::size_t col_ts = column_of("timestamp");
  const std::size_t col_user = column_of("user_id");
  const std::size_t col_item = column_of("item_id");
  const std::size_t col_rating = column_of("rating");
  std::vector<std::size_t> dim_cols;
  for (const auto& d : schema.dimensions()) dim_cols.push_back(column_of(d.name));

  enum class TsFormat { kUnknown, kEpoch, kIso };
  TsFormat ts_format = TsFormat::kUnknown;

  std::vector<RawInteraction> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line, format.delimiter, row_no, source);
    auto fail = [&](const std::string& column, const std::string& why) {
      throw ParseError(source + ": row " + std::to_string(row_no) + ", column '" + column +
                       "': " + why);
    };
    if (cells.size() != header.size()) {
      throw ParseError(source + ": row " + std::to_string(row_no) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    RawInteraction r;
    const std::string ts = has_ts ? trim(cells[col_ts]) : std::to_string(rows.size());
    if (ts_format == TsFormat::kUnknown) {
      ts_format = is_integer_text(ts) ? TsFormat::kEpoch : TsFormat::kIso;
    }
    if (ts_format == TsFormat::kEpoch) {
      if (!is_integer_text(ts)) fail("timestamp", "expected integer epoch seconds, got '" + ts + "'");
      try {
        r.timestamp = std::stoll(ts);
      } catch (const std::exception&) {
        fail("timestamp", "out of range '" + ts + "'");
      }
    } else {
      auto parsed = parse_iso8601(ts);
      if (!parsed) fail("timestamp", "expected ISO-8601 timestamp, got '" + ts + "'");
      r.timestamp = *parsed;
    }
    r.user_id = trim(cells[col_user]);
    r.item_id = trim(cells[col_item]);
    if (r.user_id.empty()) fail("user_id", "empty");
    if (r.item_id.empty()) fail("item_id", "empty");
    const std::string rating =
        has_rating ? trim(cells[col_rating]) : std::to_string(doc.rating_scale.midpoint());
    if (auto label = doc.rating_scale.labels.find(rating); label != doc.rating_scale.labels.end()) {
      r.rating = label->second;
    } else if (auto v = parse_real(rating)) {
      r.rating = *v;
    } else {
      fail("rating", "not a number or known label: '" + rating + "'");
    }
    if (has_rating && !doc.rating_scale.contains(r.rating)) fail("rating", "outside the declared rating scale");

    r.context.reserve(schema.dimensions().size());
    for (std::size_t k = 0; k < schema.dimensions().size(); ++k) {
      const auto& dim = schema.dimensions()[k];
      const std::string cell = trim(cells[dim_cols[k]]);
      if (cell.empty()) {
        r.context.emplace_back(std::nullopt);
      } else if (dim.kind == DimensionKind::kNominal) {
        if (std::find(dim.categories.begin(), dim.categories.end(), cell) == dim.categories.end()) {
          fail(dim.name, "unknown category '" + cell + "'");
        }
        r.context.emplace_back(ContextValue{cell});
      } else {
        auto v = parse_real(cell);
        if (!v) fail(dim.name, "not a number: '" + cell + "'");
        r.context.emplace_back(ContextValue{*v});
      }
    }
    rows.push_back(std::move(r));
  }
  return Dataset(schema, std::move(rows), doc.rating_scale);
}

Dataset load_interactions(const std::string& path, const SchemaDocument& schema,
                          const CsvFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path);
  return read_interactions(in, schema, format, path);
}

void write_interactions(std::ostream& out, const Dataset& ds) {
  out << "timestamp,user_id,item_id,rating";
  for (const auto& d : ds.schema().dimensions()) out << ',' << quote_cell(d.name, ',');
  out << '\n';
  for (const auto& r : ds.interactions()) {
    out << r.timestamp << ',' << quote_cell(r.user_id, ',') << ',' << quote_cell(r.item_id, ',')
        << ',' << format_real(r.rating);
    for (const auto& cell : r.context) {
      out << ',';
      if (!cell) continue;
      if (const auto* s = std::get_if<std::string>(&*cell)) {
        out << quote_cell(*s, ',');
      } else {
        out << format_real(std::get<double>(*cell));
      }
    }
    out << '\n';
  }
}

void save_interactions(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_interactions(out, ds);
  if (!out) throw IoError("failed writing " + path);
}

ContextVector binarize(const RawInteraction& raw, const FeatureSchema& schema) {
  const auto& dims = schema.dimensions();
  if (raw.context.size() != dims.size()) {
    throw SchemaMismatch("interaction has " + std::to_string(raw.context.size()) +
                         " context cells, schema has " + std::to_string(dims.size()) +
                         " dimensions");
  }
  ContextVector v;
  v.timestamp = raw.timestamp;
  v.values.assign(schema.width(), 0.0);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const auto& cell = raw.context[k];
    if (!cell) continue;
    const auto& dim = dims[k];
    const std::size_t off = schema.column_offset(k);
    if (dim.kind == DimensionKind::kNominal) {
      const auto* label = std::get_if<std::string>(&*cell);
      if (label == nullptr) {
        throw UnknownCategory(dim.name + ": numeric value given for a nominal dimension");
      }
      auto it = std::find(dim.categories.begin(), dim.categories.end(), *label);
      if (it == dim.categories.end()) throw UnknownCategory(dim.name + ": '" + *label + "'");
      v.values[off + static_cast<std::size_t>(it - dim.categories.begin())] = 1.0;
    } else {
      const auto* number = std::get_if<double>(&*cell);
      if (number == nullptr) {
        throw UnknownCategory(dim.name + ": label given for a numeric dimension");
      }
      v.values[off] = std::clamp((*number - dim.min) / (dim.max - dim.min), 0.0, 1.0);
    }
  }
  return v;
}

std::vector<ContextVector> binarize_all(const Dataset& ds) {
  std::vector<ContextVector> out;
  out.reserve(ds.size());
  for (const auto& r : ds.interactions()) out.push_back(binarize(r, ds.schema()));
  return out;
}

std::optional<std::string> decode_nominal(const ContextVector& v, const FeatureSchema& schema,
                                          std::size_t dim) {
  const auto& d = schema.dimensions().at(dim);
  if (d.kind != DimensionKind::kNominal) return std::nullopt;
  const std::size_t off = schema.column_offset(dim);
  for (std::size_t c = 0; c < d.categories.size(); ++c) {
    if (v.values.at(off + c) == 1.0) return d.categories[c];
  }
  return std::nullopt;
}

std::pair<Dataset, Dataset> time_split(const Dataset& ds, double train_fraction) {
  if (ds.empty()) throw EmptyDataset("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DegenerateSplit("train fraction must lie in (0, 1)");
  }
  const std::size_t n = ds.size();
  // Guard against 0.7 * 10 landing a hair above 7.
  const auto n_train = static_cast<std::size_t>(
      std::ceil(train_fraction * static_cast<double>(n) - 1e-9));
  if (n_train == 0 || n_train >= n) {
    throw DegenerateSplit("fraction " + std::to_string(train_fraction) + " of " +
                          std::to_string(n) + " interactions leaves an empty side");
  }
  return {ds.slice(0, n_train), ds.slice(n_train, n)};
}

std::vector<ContextSequence> generate_sequences(const std::vector<ContextVector>& vectors,
                                                std::size_t length) {
  if (length == 0) throw InvalidConfig("sequence length must be at least 1");
  std::vector<ContextSequence> out;
  if (vectors.size() < length) return out;
  out.reserve(vectors.size() - length + 1);
  for (std::size_t start = 0; start + length <= vectors.size(); ++start) {
    ContextSequence s;
    s.vectors.assign(vectors.begin() + static_cast<std::ptrdiff_t>(start),
                     vectors.begin() + static_cast<std::ptrdiff_t>(start + length));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ContextSequence> generate_sequences(const Dataset& ds, std::size_t length) {
  return generate_sequences(binarize_all(ds), length);
}

}  // namespace ctxrec::data
