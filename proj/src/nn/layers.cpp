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

#include "ctxrec/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/simd/kernels.hpp"

namespace ctxrec::nn {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: return "identity";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw InvalidConfig("unknown activation '" + std::string(name) + "'");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::kSigmoid: return sigmoid(x);
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kIdentity: return x;
  }
  return x;
}

double activation_derivative(Activation a, double y) {
  switch (a) {
    case Activation::kSigmoid: return y * (1.0 - y);
    case Activation::kRelu: return y > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: return 1.0 - y * y;
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

DenseLayer DenseLayer::create(ParameterSet& params, const std::string& name,
                              std::size_t in, std::size_t out, Activation activation) {
  if (in == 0 || out == 0) throw InvalidConfig("dense layer " + name + " has a zero dimension");
  DenseLayer layer;
  layer.in = in;
  layer.out = out;
  layer.activation = activation;
  layer.weight_offset = params.add(name + ".weight", {out, in}, InitRule::uniform_fan_in(in));
  layer.bias_offset = params.add(name + ".bias", {out}, InitRule::uniform_fan_in(in));
  return layer;
}

void DenseLayer::forward(std::span<const double> params, std::span<const double> x,
                         std::span<double> y) const {
  const double* w = params.data() + weight_offset;
  const double* b = params.data() + bias_offset;
  simd::gemv(w, out, in, x.data(), y.data());
  for (std::size_t j = 0; j < out; ++j) y[j] = activate(activation, y[j] + b[j]);
}

void DenseLayer::backward(std::span<const double> params, std::span<double> grads,
                          std::span<const double> x, std::span<const double> y,
                          std::span<double> dy, std::span<double> dx) const {
  for (std::size_t j = 0; j < out; ++j) dy[j] *= activation_derivative(activation, y[j]);
  double* gb = grads.data() + bias_offset;
  for (std::size_t j = 0; j < out; ++j) gb[j] += dy[j];
  simd::outer_acc(dy.data(), out, x.data(), in, grads.data() + weight_offset);
  if (!dx.empty()) {
    simd::gemv_t_acc(params.data() + weight_offset, out, in, dy.data(), dx.data());
  }
}

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> params,
                                  std::span<const double> x) {
  if (x.size() != layer.in) {
    throw ShapeMismatch("dense input has " + std::to_string(x.size()) +
                        " entries, layer expects " + std::to_string(layer.in));
  }
  std::vector<double> y(layer.out);
  layer.forward(params, x, y);
  return y;
}

std::size_t Vocabulary::add(const std::string& id) {
  auto [it, inserted] = index_.emplace(id, ids_.size());
  if (inserted) ids_.push_back(id);
  return it->second;
}

std::optional<std::size_t> Vocabulary::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable EmbeddingTable::create(ParameterSet& params, const std::string& name,
                                      std::size_t vocab, std::size_t dim, double init_sd) {
  if (vocab == 0 || dim == 0) throw InvalidConfig("embedding " + name + " has a zero dimension");
  EmbeddingTable table;
  table.vocab = vocab;
  table.dim = dim;
  table.offset = params.add(name + ".table", {vocab, dim}, InitRule::normal(init_sd));
  return table;
}

std::span<const double> EmbeddingTable::row(std::span<const double> params,
                                            std::size_t index) const {
  if (index >= vocab) {
    throw ShapeMismatch("embedding row " + std::to_string(index) + " out of range " +
                        std::to_string(vocab));
  }
  return params.subspan(offset + index * dim, dim);
}

void EmbeddingTable::accumulate(std::span<double> grads, std::size_t index,
                                std::span<const double> grad_row) const {
  double* g = grads.data() + offset + index * dim;
  for (std::size_t k = 0; k < dim; ++k) g[k] += grad_row[k];
}

LstmCell LstmCell::create(ParameterSet& params, const std::string& name,
                          std::size_t input_size, std::size_t hidden_size) {
  if (input_size == 0 || hidden_size == 0) {
    throw InvalidConfig("lstm cell " + name + " has a zero dimension");
  }
  LstmCell cell;
  cell.input_size = input_size;
  cell.hidden_size = hidden_size;
  const std::size_t fan_in = input_size + hidden_size;
  cell.weight_offset = params.add(name + ".weight", {4 * hidden_size, fan_in},
                                  InitRule::uniform_fan_in(fan_in));
  cell.bias_offset = params.add(name + ".bias", {4 * hidden_size}, InitRule::uniform_fan_in(fan_in));
  return cell;
}

void LstmCell::forward(std::span<const double> params, std::span<const double> x,
                       std::span<const double> h_prev, std::span<const double> c_prev,
                       Step& step) const {
  const std::size_t d = input_size;
  const std::size_t hs = hidden_size;
  step.concat.resize(d + hs);
  std::copy(x.begin(), x.end(), step.concat.begin());
  std::copy(h_prev.begin(), h_prev.end(), step.concat.begin() + d);
  step.gates.resize(4 * hs);
  simd::gemv(params.data() + weight_offset, 4 * hs, d + hs, step.concat.data(),
             step.gates.data());
  const double* b = params.data() + bias_offset;
  step.c.resize(hs);
  step.tanh_c.resize(hs);
  step.h.resize(hs);
  double* gi = step.gates.data();
  double* gf = gi + hs;
  double* gg = gf + hs;
  double* go = gg + hs;
  for (std::size_t k = 0; k < hs; ++k) {
    gi[k] = sigmoid(gi[k] + b[k]);
    gf[k] = sigmoid(gf[k] + b[hs + k]);
    gg[k] = std::tanh(gg[k] + b[2 * hs + k]);
    go[k] = sigmoid(go[k] + b[3 * hs + k]);
    step.c[k] = gf[k] * c_prev[k] + gi[k] * gg[k];
    step.tanh_c[k] = std::tanh(step.c[k]);
    step.h[k] = go[k] * step.tanh_c[k];
  }
}

void LstmCell::backward(std::span<const double> params, std::span<double> grads,
                        const Step& step, std::span<const double> c_prev,
                        std::span<const double> dh, std::span<const double> dc,
                        std::span<double> dx, std::span<double> dh_prev,
                        std::span<double> dc_prev) const {
  const std::size_t d = input_size;
  const std::size_t hs = hidden_size;
  const double* gi = step.gates.data();
  const double* gf = gi + hs;
  const double* gg = gf + hs;
  const double* go = gg + hs;

  thread_local std::vector<double> da;
  thread_local std::vector<double> dz;
  da.assign(4 * hs, 0.0);
  dz.assign(d + hs, 0.0);
  for (std::size_t k = 0; k < hs; ++k) {
    const double dct = dc[k] + dh[k] * go[k] * (1.0 - step.tanh_c[k] * step.tanh_c[k]);
    da[k] = dct * gg[k] * gi[k] * (1.0 - gi[k]);
    da[hs + k] = dct * c_prev[k] * gf[k] * (1.0 - gf[k]);
    da[2 * hs + k] = dct * gi[k] * (1.0 - gg[k] * gg[k]);
    da[3 * hs + k] = dh[k] * step.tanh_c[k] * go[k] * (1.0 - go[k]);
    dc_prev[k] = dct * gf[k];
  }
  double* gb = grads.data() + bias_offset;
  for (std::size_t k = 0; k < 4 * hs; ++k) gb[k] += da[k];
  simd::outer_acc(da.data(), 4 * hs, step.concat.data(), d + hs, grads.data() + weight_offset);
  simd::gemv_t_acc(params.data() + weight_offset, 4 * hs, d + hs, da.data(), dz.data());
  if (!dx.empty()) {
    for (std::size_t j = 0; j < d; ++j) dx[j] += dz[j];
  }
  for (std::size_t k = 0; k < hs; ++k) dh_prev[k] = dz[d + k];
}

LstmState lstm_step(const LstmCell& cell, std::span<const double> params,
                    std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev) {
  if (x.size() != cell.input_size || h_prev.size() != cell.hidden_size ||
      c_prev.size() != cell.hidden_size) {
    throw ShapeMismatch("lstm_step: expected x[" + std::to_string(cell.input_size) +
                        "], h/c[" + std::to_string(cell.hidden_size) + "]");
  }
  LstmCell::Step step;
  cell.forward(params, x, h_prev, c_prev, step);
  return {std::move(step.h), std::move(step.c)};
}

}  // namespace ctxrec::nn
