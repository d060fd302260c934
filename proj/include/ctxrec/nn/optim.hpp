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
#include <functional>
#include <span>
#include <vector>

#include "ctxrec/nn/parameters.hpp"

namespace ctxrec::nn {

/// Mean of squared differences. Throws ShapeMismatch / EmptyInput.
double mse_loss(std::span<const double> pred, std::span<const double> target);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double base_lr = 0.01;
  double floor_lr = 0.001;
  /// Step count at which the learning rate reaches floor_lr.
  std::uint64_t total_steps = 1;
};

/// Adam with square-root learning-rate decay:
///   lr(t) = max(base_lr / sqrt(1 + t / tau), floor_lr)
/// where tau = total_steps / ((base_lr / floor_lr)^2 - 1), so lr(0) = base_lr
/// and lr(total_steps) = floor_lr.
class AdamState {
 public:
  AdamState(std::size_t n_params, AdamConfig config);

  double lr_at(std::uint64_t t) const;
  std::uint64_t step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

  /// Applies one bias-corrected update with lr_at(t) and increments t.
  /// Non-finite gradients abort the step (parameters untouched) with
  /// NonFiniteGradient naming the offending tensor.
  void step(ParameterSet& params, std::span<const double> grads);

 private:
  AdamConfig config_;
  double tau_ = 0.0;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

/// Scalar objective over a flat parameter vector. When `grad` is non-empty
/// the closure also writes the analytic gradient into it (overwriting).
using Objective = std::function<double(std::span<const double> params, std::span<double> grad)>;

struct GradCheckOptions {
  double epsilon = 1e-5;
  /// 0 checks every coordinate; otherwise this many sampled coordinates.
  std::size_t max_coordinates = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Central-difference verification of `objective`'s analytic gradient.
/// Relative error per coordinate is
///   |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
GradCheckResult grad_check(const Objective& objective, std::span<const double> params,
                           const GradCheckOptions& options = {});

}  // namespace ctxrec::nn
