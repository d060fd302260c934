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
#include <string>
#include <vector>

#include "ctxrec/nn/optim.hpp"
#include "ctxrec/nn/parameters.hpp"

namespace ctxrec::nn {

/// "Iterations" may count passes over the data or optimizer steps.
enum class IterationUnit { kEpochs, kSteps };

struct TrainingConfig {
  std::size_t batch_size = 512;
  std::size_t iterations = 500;
  IterationUnit unit = IterationUnit::kEpochs;
  std::uint64_t seed = 1;
  double base_lr = 0.01;
  double floor_lr = 0.001;
};

struct TrainingTrace {
  /// Mean per-example loss over each (possibly partial, in step mode) epoch.
  std::vector<double> epoch_loss;
  std::uint64_t steps = 0;
};

/// Per-batch callback: for the example indices in `batch`, returns the SUM of
/// per-example losses and ACCUMULATES the sum of per-example gradients into
/// `grads` (zeroed by the caller).
using BatchObjective = std::function<double(std::span<const double> params,
                                            std::span<const std::size_t> batch,
                                            std::span<double> grads)>;

/// Mini-batch Adam with square-root decay. The shuffle stream is derived
/// from config.seed only. Throws DivergedTraining on non-finite loss or
/// gradient.
TrainingTrace train_minibatch(ParameterSet& params, std::size_t n_examples,
                              const TrainingConfig& config, const BatchObjective& objective);

std::uint64_t total_steps(std::size_t n_examples, const TrainingConfig& config);

std::string_view iteration_unit_name(IterationUnit unit);
IterationUnit parse_iteration_unit(std::string_view name);

}  // namespace ctxrec::nn
