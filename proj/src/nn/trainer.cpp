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

#include "ctxrec/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/random.hpp"

namespace ctxrec::nn {

std::string_view iteration_unit_name(IterationUnit unit) {
  return unit == IterationUnit::kEpochs ? "epochs" : "steps";
}

IterationUnit parse_iteration_unit(std::string_view name) {
  if (name == "epochs") return IterationUnit::kEpochs;
  if (name == "steps") return IterationUnit::kSteps;
  throw InvalidConfig("iteration unit must be 'epochs' or 'steps', got '" + std::string(name) + "'");
}

std::uint64_t total_steps(std::size_t n_examples, const TrainingConfig& config) {
  if (config.unit == IterationUnit::kSteps) return config.iterations;
  const std::size_t per_epoch = (n_examples + config.batch_size - 1) / config.batch_size;
  return static_cast<std::uint64_t>(per_epoch) * config.iterations;
}

TrainingTrace train_minibatch(ParameterSet& params, std::size_t n_examples,
                              const TrainingConfig& config, const BatchObjective& objective) {
  if (n_examples == 0) throw EmptyCorpus("no training examples");
  if (config.batch_size == 0 || config.iterations == 0) {
    throw InvalidConfig("batch_size and iterations must be positive");
  }
  AdamConfig adam;
  adam.base_lr = config.base_lr;
  adam.floor_lr = config.floor_lr;
  adam.total_steps = total_steps(n_examples, config);
  AdamState optimizer(params.size(), adam);

  std::vector<std::size_t> order(n_examples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grads(params.size());
  Rng shuffle_rng(mix_seed(config.seed, 0x5eed));

  TrainingTrace trace;
  const std::uint64_t budget = adam.total_steps;
  while (trace.steps < budget) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double epoch_sum = 0.0;
    std::size_t epoch_count = 0;
    for (std::size_t start = 0; start < n_examples && trace.steps < budget;
         start += config.batch_size) {
      const std::size_t end = std::min(n_examples, start + config.batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      std::fill(grads.begin(), grads.end(), 0.0);
      const double loss_sum = objective(params.values(), batch, grads);
      if (!std::isfinite(loss_sum)) {
        throw DivergedTraining("loss became non-finite at step " + std::to_string(trace.steps));
      }
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (double& g : grads) g *= inv;
      try {
        optimizer.step(params, grads);
      } catch (const NonFiniteGradient& e) {
        throw DivergedTraining(e.what());
      }
      epoch_sum += loss_sum;
      epoch_count += batch.size();
      ++trace.steps;
    }
    trace.epoch_loss.push_back(epoch_sum / static_cast<double>(epoch_count));
  }
  return trace;
}

}  // namespace ctxrec::nn
