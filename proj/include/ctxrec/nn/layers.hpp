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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctxrec/nn/parameters.hpp"

namespace ctxrec::nn {

enum class Activation { kSigmoid, kRelu, kTanh, kIdentity };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

double sigmoid(double x);
double activate(Activation a, double x);
/// Derivative expressed through the activated output y.
double activation_derivative(Activation a, double y);

/// Affine layer followed by an elementwise activation. Parameters live in a
/// ParameterSet: "<name>.weight" (out x in, row-major) and "<name>.bias".
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::kIdentity;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  static DenseLayer create(ParameterSet& params, const std::string& name,
                           std::size_t in, std::size_t out, Activation activation);

  /// y = activation(W x + b)
  void forward(std::span<const double> params, std::span<const double> x,
               std::span<double> y) const;

  /// Backpropagates through the layer. `dy` holds dL/dy on entry and is
  /// overwritten with dL/d(pre-activation). Weight and bias gradients are
  /// accumulated into `grads`; dL/dx is accumulated into `dx` unless empty.
  void backward(std::span<const double> params, std::span<double> grads,
                std::span<const double> x, std::span<const double> y,
                std::span<double> dy, std::span<double> dx) const;

  std::span<const double> weights(std::span<const double> params) const {
    return params.subspan(weight_offset, in * out);
  }
  std::span<const double> bias(std::span<const double> params) const {
    return params.subspan(bias_offset, out);
  }
};

/// Throwing dense forward with shape validation, for callers outside the
/// training loops.
std::vector<double> dense_forward(const DenseLayer& layer,
                                  std::span<const double> params,
                                  std::span<const double> x);

/// Maps opaque string ids to dense row indices in insertion order.
class Vocabulary {
 public:
  std::size_t add(const std::string& id);
  std::optional<std::size_t> find(const std::string& id) const;
  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t index) const { return ids_.at(index); }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Lookup table of `vocab` rows of width `dim`, stored as "<name>.table".
struct EmbeddingTable {
  std::size_t vocab = 0;
  std::size_t dim = 0;
  std::size_t offset = 0;

  static EmbeddingTable create(ParameterSet& params, const std::string& name,
                               std::size_t vocab, std::size_t dim, double init_sd);

  /// Throws ShapeMismatch for out-of-range rows; never returns a silent zero.
  std::span<const double> row(std::span<const double> params, std::size_t index) const;
  void accumulate(std::span<double> grads, std::size_t index,
                  std::span<const double> grad_row) const;
};

/// Standard LSTM cell. The four gates (input, forget, candidate, output) share
/// one (4H x (D+H)) weight matrix applied to concat(x, h_prev).
struct LstmCell {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  /// Activations kept for the backward pass.
  struct Step {
    std::vector<double> concat;  // (x, h_prev)
    std::vector<double> gates;   // i, f, g, o after their nonlinearities
    std::vector<double> c;
    std::vector<double> tanh_c;
    std::vector<double> h;
  };

  static LstmCell create(ParameterSet& params, const std::string& name,
                         std::size_t input_size, std::size_t hidden_size);

  void forward(std::span<const double> params, std::span<const double> x,
               std::span<const double> h_prev, std::span<const double> c_prev,
               Step& step) const;

  /// `dh`/`dc` are the total gradients reaching this step's outputs.
  /// Accumulates into `grads` and `dx` (unless empty); overwrites
  /// `dh_prev`/`dc_prev`.
  void backward(std::span<const double> params, std::span<double> grads,
                const Step& step, std::span<const double> c_prev,
                std::span<const double> dh, std::span<const double> dc,
                std::span<double> dx, std::span<double> dh_prev,
                std::span<double> dc_prev) const;
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

/// One validated LSTM step: returns (h, c).
LstmState lstm_step(const LstmCell& cell, std::span<const double> params,
                    std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev);

}  // namespace ctxrec::nn
