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

#include "ctxrec/nn/parameters.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/hash.hpp"
#include "ctxrec/common/random.hpp"

namespace ctxrec::nn {
namespace {

constexpr std::array<char, 8> kMagic = {'C', 'T', 'X', 'P', 'A', 'R', 'A', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated parameter container");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated parameter container");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

InitRule InitRule::uniform_fan_in(std::size_t fan_in) {
  return {Kind::kUniform, 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)))};
}

std::size_t ParameterSet::add(std::string name, std::vector<std::size_t> shape,
                              InitRule init) {
  for (const auto& t : tensors_) {
    if (t.name == name) throw InvalidConfig("duplicate parameter name " + name);
  }
  const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                        std::multiplies<>());
  TensorInfo info{std::move(name), std::move(shape), data_.size(), n, init};
  data_.resize(data_.size() + n, 0.0);
  tensors_.push_back(std::move(info));
  return tensors_.back().offset;
}

const TensorInfo& ParameterSet::info(std::string_view name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  throw InvalidConfig("no parameter named " + std::string(name));
}

std::span<double> ParameterSet::tensor(std::string_view name) {
  const auto& t = info(name);
  return std::span<double>(data_).subspan(t.offset, t.size);
}

std::span<const double> ParameterSet::tensor(std::string_view name) const {
  const auto& t = info(name);
  return std::span<const double>(data_).subspan(t.offset, t.size);
}

const TensorInfo& ParameterSet::owner_of(std::size_t index) const {
  auto it = std::upper_bound(tensors_.begin(), tensors_.end(), index,
                             [](std::size_t i, const TensorInfo& t) { return i < t.offset; });
  if (it == tensors_.begin() || index >= data_.size()) {
    throw ShapeMismatch("flat index out of range");
  }
  return *std::prev(it);
}

void ParameterSet::initialize(std::uint64_t seed) {
  for (const auto& t : tensors_) {
    Rng rng(mix_seed(seed, fnv1a(t.name)));
    auto values = std::span<double>(data_).subspan(t.offset, t.size);
    switch (t.init.kind) {
      case InitRule::Kind::kZero:
        std::fill(values.begin(), values.end(), 0.0);
        break;
      case InitRule::Kind::kUniform:
        for (double& v : values) v = rng.uniform(-t.init.scale, t.init.scale);
        break;
      case InitRule::Kind::kNormal:
        for (double& v : values) v = rng.normal(0.0, t.init.scale);
        break;
    }
  }
}

bool ParameterSet::same_layout(const ParameterSet& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].name != other.tensors_[i].name ||
        tensors_[i].shape != other.tensors_[i].shape) {
      return false;
    }
  }
  return true;
}

void write_parameters(std::ostream& out, const ParameterSet& params) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(params.tensors().size()));
  const auto values = params.values();
  for (const auto& t : params.tensors()) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t d : t.shape) put_u64(out, d);
    for (std::size_t i = 0; i < t.size; ++i) {
      put_u64(out, std::bit_cast<std::uint64_t>(values[t.offset + i]));
    }
  }
  if (!out) throw IoError("failed writing parameter container");
}

ParameterSet read_parameters(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("not a parameter container (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw ParseError("unsupported parameter container version " + std::to_string(version));
  }
  ParameterSet params;
  const std::uint32_t count = get_u32(in);
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::uint32_t len = get_u32(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw IoError("truncated parameter container");
    const std::uint32_t ndim = get_u32(in);
    std::vector<std::size_t> shape(ndim);
    for (auto& d : shape) d = static_cast<std::size_t>(get_u64(in));
    const std::size_t offset = params.add(std::move(name), std::move(shape));
    const std::size_t n = params.tensors().back().size;
    auto values = params.values();
    for (std::size_t i = 0; i < n; ++i) {
      values[offset + i] = std::bit_cast<double>(get_u64(in));
    }
  }
  return params;
}

void load_values(ParameterSet& target, const ParameterSet& source) {
  if (!target.same_layout(source)) {
    throw ShapeMismatch("parameter layout differs from stored model");
  }
  std::copy(source.values().begin(), source.values().end(), target.values().begin());
}

}  // namespace ctxrec::nn
