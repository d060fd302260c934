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

#include "ctxrec/encoders/encoders.hpp"

#include <algorithm>
#include <cmath>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/hash.hpp"
#include "ctxrec/nn/model_file.hpp"
#include "ctxrec/nn/optim.hpp"

namespace ctxrec::encoders {
namespace {

using nn::Activation;
using nn::DenseLayer;
using nn::LstmCell;

std::uint64_t parse_fingerprint(const nlohmann::json& header) {
  if (!header.contains("schema_fingerprint")) return 0;
  return std::stoull(header.at("schema_fingerprint").get<std::string>(), nullptr, 16);
}

void require_kind(const nlohmann::json& header, const std::string& kind, const std::string& path) {
  if (header.value("kind", std::string()) != kind) {
    throw ParseError(path + ": expected a '" + kind + "' model file");
  }
}

}  // namespace

// ---------------------------------------------------------------- AutoEncoder

AutoEncoder::AutoEncoder(std::size_t width, std::size_t latent_dim, std::uint64_t seed) {
  if (width == 0 || latent_dim == 0) throw InvalidConfig("autoencoder widths must be positive");
  encoder_ = DenseLayer::create(params_, "encoder", width, latent_dim, Activation::kSigmoid);
  decoder_ = DenseLayer::create(params_, "decoder", latent_dim, width, Activation::kSigmoid);
  params_.initialize(seed);
}

LatentContext AutoEncoder::encode(std::span<const double> context) const {
  if (context.size() != width()) {
    throw ShapeMismatch("autoencoder expects width " + std::to_string(width()) + ", got " +
                        std::to_string(context.size()));
  }
  return {nn::dense_forward(encoder_, params_.values(), context), LatentContext::Kind::kCurrent};
}

std::vector<double> AutoEncoder::decode(std::span<const double> latent) const {
  return nn::dense_forward(decoder_, params_.values(), latent);
}

std::vector<double> AutoEncoder::reconstruct(std::span<const double> context) const {
  return decode(encode(context).values);
}

double AutoEncoder::example_loss(std::span<const double> params, std::span<const double> x,
                                 std::span<double> grads) const {
  const std::size_t w = width();
  const std::size_t k = latent_dim();
  thread_local std::vector<double> hidden, out, dout, dhidden;
  hidden.resize(k);
  out.resize(w);
  encoder_.forward(params, x, hidden);
  decoder_.forward(params, hidden, out);
  double loss = 0.0;
  for (std::size_t j = 0; j < w; ++j) loss += (out[j] - x[j]) * (out[j] - x[j]);
  loss /= static_cast<double>(w);
  if (grads.empty()) return loss;
  dout.resize(w);
  for (std::size_t j = 0; j < w; ++j) dout[j] = 2.0 * (out[j] - x[j]) / static_cast<double>(w);
  dhidden.assign(k, 0.0);
  decoder_.backward(params, grads, hidden, out, dout, dhidden);
  encoder_.backward(params, grads, x, hidden, dhidden, {});
  return loss;
}

nlohmann::json AutoEncoder::header() const {
  nlohmann::json h;
  h["kind"] = "autoencoder";
  h["width"] = width();
  h["latent_dim"] = latent_dim();
  h["layer_widths"] = layer_widths();
  h["schema_fingerprint"] = to_hex(schema_fingerprint_);
  return h;
}

void AutoEncoder::save(const std::string& path) const {
  nn::write_model_file(path, header(), params_);
}

AutoEncoder AutoEncoder::load(const std::string& path) {
  auto file = nn::read_model_file(path);
  require_kind(file.header, "autoencoder", path);
  AutoEncoder model(file.header.at("width").get<std::size_t>(),
                    file.header.at("latent_dim").get<std::size_t>(), 0);
  nn::load_values(model.params_, file.params);
  model.schema_fingerprint_ = parse_fingerprint(file.header);
  return model;
}

// ------------------------------------------------------- LstmEncoderDecoder

std::string_view slc_source_name(SlcSource s) {
  switch (s) {
    case SlcSource::kEncoderHidden: return "encoder_hidden";
    case SlcSource::kBottleneck: return "bottleneck";
    case SlcSource::kHiddenAndCell: return "hidden_and_cell";
  }
  return "encoder_hidden";
}

SlcSource parse_slc_source(std::string_view name) {
  if (name == "encoder_hidden") return SlcSource::kEncoderHidden;
  if (name == "bottleneck") return SlcSource::kBottleneck;
  if (name == "hidden_and_cell") return SlcSource::kHiddenAndCell;
  throw InvalidConfig("unknown slc source '" + std::string(name) + "'");
}

struct LstmEncoderDecoder::Trace {
  std::vector<LstmCell::Step> enc;
  std::vector<LstmCell::Step> dec;
  std::vector<double> enc_final;  // [h_L; c_L]
  std::vector<double> z;
  std::vector<double> init;       // [h_0'; c_0']
  std::vector<double> outputs;    // L * width
};

LstmEncoderDecoder::LstmEncoderDecoder(std::size_t width, std::size_t latent_dim,
                                       std::size_t sequence_length, std::uint64_t seed,
                                       SlcSource slc)
    : length_(sequence_length), slc_(slc) {
  if (width == 0 || latent_dim == 0 || sequence_length == 0) {
    throw InvalidConfig("lstm encoder-decoder dimensions must be positive");
  }
  const std::size_t h = latent_dim;
  encoder_ = LstmCell::create(params_, "encoder", width, h);
  bottleneck_in_ = DenseLayer::create(params_, "bottleneck_in", 2 * h, h, Activation::kTanh);
  bottleneck_out_ = DenseLayer::create(params_, "bottleneck_out", h, 2 * h, Activation::kTanh);
  decoder_ = LstmCell::create(params_, "decoder", h, h);
  head_ = DenseLayer::create(params_, "head", h, width, Activation::kSigmoid);
  params_.initialize(seed);
}

void LstmEncoderDecoder::run(std::span<const double> params, std::span<const double> flat,
                             Trace& tr, bool decode) const {
  const std::size_t w = width();
  const std::size_t h = latent_dim();
  const std::vector<double> zeros(h, 0.0);
  tr.enc.resize(length_);
  std::span<const double> h_prev = zeros;
  std::span<const double> c_prev = zeros;
  for (std::size_t t = 0; t < length_; ++t) {
    encoder_.forward(params, flat.subspan(t * w, w), h_prev, c_prev, tr.enc[t]);
    h_prev = tr.enc[t].h;
    c_prev = tr.enc[t].c;
  }
  tr.enc_final.resize(2 * h);
  std::copy(h_prev.begin(), h_prev.end(), tr.enc_final.begin());
  std::copy(c_prev.begin(), c_prev.end(), tr.enc_final.begin() + static_cast<std::ptrdiff_t>(h));
  tr.z.resize(h);
  bottleneck_in_.forward(params, tr.enc_final, tr.z);
  if (!decode) return;

  tr.init.resize(2 * h);
  bottleneck_out_.forward(params, tr.z, tr.init);
  tr.dec.resize(length_);
  tr.outputs.resize(length_ * w);
  h_prev = std::span<const double>(tr.init).first(h);
  c_prev = std::span<const double>(tr.init).subspan(h, h);
  for (std::size_t t = 0; t < length_; ++t) {
    decoder_.forward(params, tr.z, h_prev, c_prev, tr.dec[t]);
    head_.forward(params, tr.dec[t].h, std::span<double>(tr.outputs).subspan(t * w, w));
    h_prev = tr.dec[t].h;
    c_prev = tr.dec[t].c;
  }
}

double LstmEncoderDecoder::example_loss(std::span<const double> params,
                                        std::span<const double> flat,
                                        std::span<double> grads) const {
  thread_local Trace tr;
  run(params, flat, tr, true);
  const std::size_t w = width();
  const std::size_t h = latent_dim();
  const std::size_t n = length_ * w;
  double loss = 0.0;
  for (std::size_t j = 0; j < n; ++j) loss += (tr.outputs[j] - flat[j]) * (tr.outputs[j] - flat[j]);
  loss /= static_cast<double>(n);
  if (grads.empty()) return loss;

  thread_local std::vector<double> dy, dz, dh, dc, dh_prev, dc_prev, dinit, denc;
  dy.resize(n);
  for (std::size_t j = 0; j < n; ++j) dy[j] = 2.0 * (tr.outputs[j] - flat[j]) / static_cast<double>(n);
  dz.assign(h, 0.0);
  dh.assign(h, 0.0);
  dc.assign(h, 0.0);
  dh_prev.assign(h, 0.0);
  dc_prev.assign(h, 0.0);
  const std::span<const double> init_c = std::span<const double>(tr.init).subspan(h, h);
  for (std::size_t t = length_; t-- > 0;) {
    head_.backward(params, grads, tr.dec[t].h, std::span<const double>(tr.outputs).subspan(t * w, w),
                   std::span<double>(dy).subspan(t * w, w), dh);
    const std::span<const double> c_prev = t > 0 ? std::span<const double>(tr.dec[t - 1].c) : init_c;
    decoder_.backward(params, grads, tr.dec[t], c_prev, dh, dc, dz, dh_prev, dc_prev);
    dh.swap(dh_prev);
    dc.swap(dc_prev);
  }
  dinit.resize(2 * h);
  std::copy(dh.begin(), dh.end(), dinit.begin());
  std::copy(dc.begin(), dc.end(), dinit.begin() + static_cast<std::ptrdiff_t>(h));
  bottleneck_out_.backward(params, grads, tr.z, tr.init, dinit, dz);
  denc.assign(2 * h, 0.0);
  bottleneck_in_.backward(params, grads, tr.enc_final, tr.z, dz, denc);
  std::copy(denc.begin(), denc.begin() + static_cast<std::ptrdiff_t>(h), dh.begin());
  std::copy(denc.begin() + static_cast<std::ptrdiff_t>(h), denc.end(), dc.begin());
  const std::vector<double> zeros(h, 0.0);
  for (std::size_t t = length_; t-- > 0;) {
    const std::span<const double> c_prev = t > 0 ? std::span<const double>(tr.enc[t - 1].c)
                                                 : std::span<const double>(zeros);
    encoder_.backward(params, grads, tr.enc[t], c_prev, dh, dc, {}, dh_prev, dc_prev);
    dh.swap(dh_prev);
    dc.swap(dc_prev);
  }
  return loss;
}

std::vector<double> LstmEncoderDecoder::flatten(const data::ContextSequence& sequence) const {
  if (sequence.length() != length_) {
    throw ShapeMismatch("sequence has length " + std::to_string(sequence.length()) +
                        ", model expects " + std::to_string(length_));
  }
  std::vector<double> flat;
  flat.reserve(length_ * width());
  for (const auto& v : sequence.vectors) {
    if (v.values.size() != width()) {
      throw ShapeMismatch("context vector has width " + std::to_string(v.values.size()) +
                          ", model expects " + std::to_string(width()));
    }
    flat.insert(flat.end(), v.values.begin(), v.values.end());
  }
  return flat;
}

LatentContext LstmEncoderDecoder::encode_flat(std::span<const double> flat) const {
  if (flat.size() != length_ * width()) throw ShapeMismatch("flattened sequence has wrong size");
  Trace tr;
  run(params_.values(), flat, tr, false);
  LatentContext out;
  out.kind = LatentContext::Kind::kSequential;
  const std::size_t h = latent_dim();
  switch (slc_) {
    case SlcSource::kEncoderHidden:
      out.values.assign(tr.enc_final.begin(), tr.enc_final.begin() + static_cast<std::ptrdiff_t>(h));
      break;
    case SlcSource::kBottleneck:
      out.values = tr.z;
      break;
    case SlcSource::kHiddenAndCell:
      out.values = tr.enc_final;
      break;
  }
  return out;
}

LatentContext LstmEncoderDecoder::encode(const data::ContextSequence& sequence) const {
  return encode_flat(flatten(sequence));
}

std::vector<double> LstmEncoderDecoder::reconstruct_flat(std::span<const double> flat) const {
  if (flat.size() != length_ * width()) throw ShapeMismatch("flattened sequence has wrong size");
  Trace tr;
  run(params_.values(), flat, tr, true);
  return tr.outputs;
}

std::vector<std::vector<double>> LstmEncoderDecoder::reconstruct(
    const data::ContextSequence& sequence) const {
  const auto flat = reconstruct_flat(flatten(sequence));
  std::vector<std::vector<double>> out(length_);
  for (std::size_t t = 0; t < length_; ++t) {
    out[t].assign(flat.begin() + static_cast<std::ptrdiff_t>(t * width()),
                  flat.begin() + static_cast<std::ptrdiff_t>((t + 1) * width()));
  }
  return out;
}

nlohmann::json LstmEncoderDecoder::header() const {
  nlohmann::json hd;
  hd["kind"] = "lstm_encdec";
  hd["width"] = width();
  hd["latent_dim"] = latent_dim();
  hd["sequence_length"] = length_;
  hd["layer_widths"] = layer_widths();
  hd["slc_source"] = std::string(slc_source_name(slc_));
  hd["schema_fingerprint"] = to_hex(schema_fingerprint_);
  return hd;
}

void LstmEncoderDecoder::save(const std::string& path) const {
  nn::write_model_file(path, header(), params_);
}

LstmEncoderDecoder LstmEncoderDecoder::load(const std::string& path) {
  auto file = nn::read_model_file(path);
  require_kind(file.header, "lstm_encdec", path);
  LstmEncoderDecoder model(file.header.at("width").get<std::size_t>(),
                           file.header.at("latent_dim").get<std::size_t>(),
                           file.header.at("sequence_length").get<std::size_t>(), 0,
                           parse_slc_source(file.header.value("slc_source", "encoder_hidden")));
  nn::load_values(model.params_, file.params);
  model.schema_fingerprint_ = parse_fingerprint(file.header);
  return model;
}

// ------------------------------------------------------------------ training

AutoEncoder train_autoencoder(const std::vector<data::ContextVector>& corpus,
                              std::size_t latent_dim, const nn::TrainingConfig& config,
                              EncoderTrainingResult* result) {
  if (corpus.empty()) throw EmptyCorpus("autoencoder corpus is empty");
  if (latent_dim == 0) throw InvalidConfig("latent_dim must be at least 1");
  const std::size_t w = corpus.front().values.size();
  for (const auto& v : corpus) {
    if (v.values.size() != w) throw ShapeMismatch("context vectors of different widths in corpus");
  }
  AutoEncoder model(w, latent_dim, config.seed);
  auto trace = nn::train_minibatch(
      model.parameters(), corpus.size(), config,
      [&](std::span<const double> params, std::span<const std::size_t> batch,
          std::span<double> grads) {
        double sum = 0.0;
        for (std::size_t idx : batch) sum += model.example_loss(params, corpus[idx].values, grads);
        return sum;
      });
  if (result != nullptr) {
    double total = 0.0;
    for (const auto& v : corpus) total += model.example_loss(model.parameters().values(), v.values, {});
    result->final_loss = total / static_cast<double>(corpus.size());
    result->trace = std::move(trace);
  }
  return model;
}

LstmEncoderDecoder train_lstm_encdec(const std::vector<data::ContextSequence>& corpus,
                                     std::size_t latent_dim, const nn::TrainingConfig& config,
                                     EncoderTrainingResult* result, SlcSource slc) {
  if (corpus.empty()) throw EmptyCorpus("sequence corpus is empty");
  if (latent_dim == 0) throw InvalidConfig("latent_dim must be at least 1");
  const std::size_t length = corpus.front().length();
  if (length == 0 || corpus.front().vectors.front().values.empty()) {
    throw RaggedSequences("first sequence is empty");
  }
  const std::size_t w = corpus.front().vectors.front().values.size();
  std::vector<double> flat;
  flat.reserve(corpus.size() * length * w);
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (corpus[s].length() != length) {
      throw RaggedSequences("sequence " + std::to_string(s) + " has length " +
                            std::to_string(corpus[s].length()) + ", expected " +
                            std::to_string(length));
    }
    for (const auto& v : corpus[s].vectors) {
      if (v.values.size() != w) {
        throw RaggedSequences("sequence " + std::to_string(s) + " has a vector of width " +
                              std::to_string(v.values.size()) + ", expected " + std::to_string(w));
      }
      flat.insert(flat.end(), v.values.begin(), v.values.end());
    }
  }
  LstmEncoderDecoder model(w, latent_dim, length, config.seed, slc);
  const std::size_t stride = length * w;
  const std::span<const double> all(flat);
  auto trace = nn::train_minibatch(
      model.parameters(), corpus.size(), config,
      [&](std::span<const double> params, std::span<const std::size_t> batch,
          std::span<double> grads) {
        double sum = 0.0;
        for (std::size_t idx : batch) {
          sum += model.example_loss(params, all.subspan(idx * stride, stride), grads);
        }
        return sum;
      });
  if (result != nullptr) {
    double total = 0.0;
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      total += model.example_loss(model.parameters().values(), all.subspan(s * stride, stride), {});
    }
    result->final_loss = total / static_cast<double>(corpus.size());
    result->trace = std::move(trace);
  }
  return model;
}

}  // namespace ctxrec::encoders
