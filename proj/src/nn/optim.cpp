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

#include "ctxrec/nn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/random.hpp"

namespace ctxrec::nn {

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw ShapeMismatch("mse_loss: " + std::to_string(pred.size()) + " predictions vs " +
                        std::to_string(target.size()) + " targets");
  }
  if (pred.empty()) throw EmptyInput("mse_loss on empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

AdamState::AdamState(std::size_t n_params, AdamConfig config)
    : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {
  if (!(config_.base_lr > 0.0) || !(config_.floor_lr > 0.0) ||
      config_.floor_lr > config_.base_lr) {
    throw InvalidConfig("learning-rate schedule needs 0 < floor_lr <= base_lr");
  }
  const double ratio = config_.base_lr / config_.floor_lr;
  const double steps = static_cast<double>(std::max<std::uint64_t>(config_.total_steps, 1));
  tau_ = ratio > 1.0 ? steps / (ratio * ratio - 1.0) : 0.0;
}

double AdamState::lr_at(std::uint64_t t) const {
  if (tau_ == 0.0) return config_.base_lr;
  const double lr = config_.base_lr / std::sqrt(1.0 + static_cast<double>(t) / tau_);
  return std::max(lr, config_.floor_lr);
}

void AdamState::step(ParameterSet& params, std::span<const double> grads) {
  if (grads.size() != params.size() || m_.size() != params.size()) {
    throw ShapeMismatch("adam step: gradient size does not match parameters");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NonFiniteGradient("gradient of '" + params.owner_of(i).name + "' is not finite");
    }
  }
  const double lr = lr_at(t_);
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  auto p = params.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g = grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    p[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

GradCheckResult grad_check(const Objective& objective, std::span<const double> params,
                           const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) throw InvalidConfig("grad_check epsilon must be positive");
  const std::size_t n = params.size();
  std::vector<double> point(params.begin(), params.end());
  std::vector<double> analytic(n, 0.0);
  std::vector<double> scratch(n, 0.0);

  const double f0 = objective(point, analytic);
  const double f1 = objective(point, scratch);
  if (f0 != f1 || analytic != scratch) {
    throw NonDeterministicClosure("two evaluations at the same point differ");
  }

  std::vector<std::size_t> coords(n);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (options.max_coordinates != 0 && options.max_coordinates < n) {
    Rng rng(options.seed);
    rng.shuffle(std::span<std::size_t>(coords));
    coords.resize(options.max_coordinates);
    std::sort(coords.begin(), coords.end());
  }

  GradCheckResult result;
  const std::span<double> no_grad;
  for (std::size_t idx : coords) {
    const double saved = point[idx];
    point[idx] = saved + options.epsilon;
    const double up = objective(point, no_grad);
    point[idx] = saved - options.epsilon;
    const double down = objective(point, no_grad);
    point[idx] = saved;
    const double numeric = (up - down) / (2.0 * options.epsilon);
    const double a = analytic[idx];
    const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    if (result.checked == 0 || err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = idx;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace ctxrec::nn
