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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctxrec::nn {

/// How a tensor is drawn by ParameterSet::initialize.
struct InitRule {
  enum class Kind { kZero, kUniform, kNormal };
  Kind kind = Kind::kZero;
  double scale = 0.0;  // half-width for kUniform, sd for kNormal

  static InitRule zero() { return {Kind::kZero, 0.0}; }
  static InitRule uniform_fan_in(std::size_t fan_in);
  static InitRule normal(double sd) { return {Kind::kNormal, sd}; }
};

struct TensorInfo {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
  InitRule init;
};

/// All trainable values of a model in one contiguous float64 buffer.
/// Layers hold offsets into it, so gradients, optimizer moments and
/// serialization all operate on flat spans of the same layout.
class ParameterSet {
 public:
  /// Registers a tensor; returns its offset. Names must be unique.
  std::size_t add(std::string name, std::vector<std::size_t> shape,
                  InitRule init = InitRule::zero());

  std::size_t size() const { return data_.size(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  const TensorInfo& info(std::string_view name) const;
  std::span<double> tensor(std::string_view name);
  std::span<const double> tensor(std::string_view name) const;

  /// Tensor that owns flat coordinate `index`.
  const TensorInfo& owner_of(std::size_t index) const;

  /// Draws every tensor from a stream derived from (seed, tensor name), so a
  /// tensor's initial values depend only on the seed, its name and its shape.
  void initialize(std::uint64_t seed);

  /// Same layout (names, shapes, order).
  bool same_layout(const ParameterSet& other) const;

 private:
  std::vector<TensorInfo> tensors_;
  std::vector<double> data_;
};

/// Versioned binary container: magic, version, then per tensor the name,
/// shape and row-major little-endian float64 payload. Round-trips bit-exactly.
void write_parameters(std::ostream& out, const ParameterSet& params);
ParameterSet read_parameters(std::istream& in);

/// Copies values from `source` into `target` by tensor name; layouts must match.
void load_values(ParameterSet& target, const ParameterSet& source);

}  // namespace ctxrec::nn
