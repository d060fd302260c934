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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxrec/data/dataset.hpp"
#include "ctxrec/nn/layers.hpp"
#include "ctxrec/nn/parameters.hpp"
#include "ctxrec/nn/trainer.hpp"
#include "json.hpp"

namespace ctxrec::encoders {

struct LatentContext {
  enum class Kind { kCurrent, kSequential };
  std::vector<double> values;
  Kind kind = Kind::kCurrent;
};

/// width -> latent -> width, sigmoid on both layers. Trained to reproduce
/// its input; the latent layer is the "current context" representation.
class AutoEncoder {
 public:
  AutoEncoder(std::size_t width, std::size_t latent_dim, std::uint64_t seed);

  std::size_t width() const { return encoder_.in; }
  std::size_t latent_dim() const { return encoder_.out; }
  /// {input, compressed, output} unit counts.
  std::vector<std::size_t> layer_widths() const { return {width(), latent_dim(), width()}; }

  LatentContext encode(std::span<const double> context) const;
  std::vector<double> decode(std::span<const double> latent) const;
  std::vector<double> reconstruct(std::span<const double> context) const;

  /// Reconstruction MSE of one vector under `params`; accumulates its
  /// gradient into `grads` unless empty.
  double example_loss(std::span<const double> params, std::span<const double> context,
                      std::span<double> grads) const;

  nn::ParameterSet& parameters() { return params_; }
  const nn::ParameterSet& parameters() const { return params_; }
  const nn::DenseLayer& encoder_layer() const { return encoder_; }
  const nn::DenseLayer& decoder_layer() const { return decoder_; }

  std::uint64_t schema_fingerprint() const { return schema_fingerprint_; }
  void set_schema_fingerprint(std::uint64_t f) { schema_fingerprint_ = f; }

  nlohmann::json header() const;
  void save(const std::string& path) const;
  static AutoEncoder load(const std::string& path);

 private:
  nn::ParameterSet params_;
  nn::DenseLayer encoder_;
  nn::DenseLayer decoder_;
  std::uint64_t schema_fingerprint_ = 0;
};

/// Which activation of the trained encoder-decoder is exported as the
/// sequential latent context.
enum class SlcSource {
  kEncoderHidden,  // encoder's final hidden state h_L (default)
  kBottleneck,     // compressed vector between encoder and decoder
  kHiddenAndCell,  // concat(h_L, c_L)
};

std::string_view slc_source_name(SlcSource s);
SlcSource parse_slc_source(std::string_view name);

/// LSTM sequence autoencoder.
///
///   encoder LSTM(width -> H) over x_1..x_L          -> (h_L, c_L)
///   z = tanh(B_in [h_L; c_L])                       (H units)
///   [h_0'; c_0'] = tanh(B_out z)                    decoder initial state
///   decoder LSTM(H -> H) fed z at every step        -> h_1'..h_L'
///   y_t = sigmoid(head h_t')                        reconstruction of x_t
///
/// Targets are the inputs in their original order.
class LstmEncoderDecoder {
 public:
  LstmEncoderDecoder(std::size_t width, std::size_t latent_dim, std::size_t sequence_length,
                     std::uint64_t seed, SlcSource slc = SlcSource::kEncoderHidden);

  std::size_t width() const { return encoder_.input_size; }
  std::size_t latent_dim() const { return encoder_.hidden_size; }
  std::size_t sequence_length() const { return length_; }
  SlcSource slc_source() const { return slc_; }
  void set_slc_source(SlcSource s) { slc_ = s; }
  std::size_t slc_dim() const { return slc_ == SlcSource::kHiddenAndCell ? 2 * latent_dim() : latent_dim(); }
  std::vector<std::size_t> layer_widths() const { return {width(), latent_dim(), width()}; }

  /// Sequential latent context; the decoder is not run.
  LatentContext encode(const data::ContextSequence& sequence) const;
  /// L reconstructed vectors.
  std::vector<std::vector<double>> reconstruct(const data::ContextSequence& sequence) const;

  /// `flat` is L*width values, row-major by time step.
  LatentContext encode_flat(std::span<const double> flat) const;
  std::vector<double> reconstruct_flat(std::span<const double> flat) const;
  double example_loss(std::span<const double> params, std::span<const double> flat,
                      std::span<double> grads) const;

  nn::ParameterSet& parameters() { return params_; }
  const nn::ParameterSet& parameters() const { return params_; }

  std::uint64_t schema_fingerprint() const { return schema_fingerprint_; }
  void set_schema_fingerprint(std::uint64_t f) { schema_fingerprint_ = f; }

  nlohmann::json header() const;
  void save(const std::string& path) const;
  static LstmEncoderDecoder load(const std::string& path);

 private:
  struct Trace;
  void run(std::span<const double> params, std::span<const double> flat, Trace& trace,
           bool decode) const;
  std::vector<double> flatten(const data::ContextSequence& sequence) const;

  nn::ParameterSet params_;
  nn::LstmCell encoder_;
  nn::DenseLayer bottleneck_in_;
  nn::DenseLayer bottleneck_out_;
  nn::LstmCell decoder_;
  nn::DenseLayer head_;
  std::size_t length_ = 0;
  SlcSource slc_ = SlcSource::kEncoderHidden;
  std::uint64_t schema_fingerprint_ = 0;
};

struct EncoderTrainingResult {
  nn::TrainingTrace trace;
  /// Reconstruction MSE over the full corpus after training.
  double final_loss = 0.0;
};

/// Throws EmptyCorpus, ShapeMismatch (ragged widths) or DivergedTraining.
AutoEncoder train_autoencoder(const std::vector<data::ContextVector>& corpus,
                              std::size_t latent_dim, const nn::TrainingConfig& config,
                              EncoderTrainingResult* result = nullptr);

/// Throws EmptyCorpus, RaggedSequences or DivergedTraining.
LstmEncoderDecoder train_lstm_encdec(const std::vector<data::ContextSequence>& corpus,
                                     std::size_t latent_dim, const nn::TrainingConfig& config,
                                     EncoderTrainingResult* result = nullptr,
                                     SlcSource slc = SlcSource::kEncoderHidden);

}  // namespace ctxrec::encoders
