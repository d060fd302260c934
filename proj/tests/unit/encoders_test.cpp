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

#include <gtest/gtest.h>

#include <cmath>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/random.hpp"
#include "ctxrec/encoders/encoders.hpp"
#include "ctxrec/nn/model_file.hpp"
#include "ctxrec/nn/optim.hpp"

namespace ctxrec::encoders {
namespace {

std::vector<double> random_binary(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform() < 0.3 ? 1.0 : 0.0;
  return v;
}

data::ContextSequence make_sequence(Rng& rng, std::size_t length, std::size_t width) {
  data::ContextSequence s;
  for (std::size_t t = 0; t < length; ++t) s.vectors.push_back({random_binary(rng, width), 0});
  return s;
}

TEST(AutoEncoder, ShapesAndForwardOracle) {
  AutoEncoder ae(12, 4, 3);
  EXPECT_EQ(ae.layer_widths(), (std::vector<std::size_t>{12, 4, 12}));
  Rng rng(1);
  const auto x = random_binary(rng, 12);
  const auto z = ae.encode(x);
  ASSERT_EQ(z.values.size(), 4u);
  EXPECT_EQ(z.kind, LatentContext::Kind::kCurrent);
  const auto w = ae.parameters().tensor("encoder.weight");
  const auto b = ae.parameters().tensor("encoder.bias");
  for (std::size_t j = 0; j < 4; ++j) {
    double s = b[j];
    for (std::size_t i = 0; i < 12; ++i) s += w[j * 12 + i] * x[i];
    EXPECT_NEAR(z.values[j], 1.0 / (1.0 + std::exp(-s)), 1e-12);
  }
  const auto y = ae.reconstruct(x);
  const auto y2 = ae.decode(z.values);
  EXPECT_EQ(y, y2);
  for (double v : y) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_THROW(ae.encode(std::vector<double>(11)), ShapeMismatch);
}

TEST(AutoEncoder, LossGradientMatchesFiniteDifferences) {
  AutoEncoder ae(10, 3, 5);
  Rng rng(2);
  const auto x = random_binary(rng, 10);
  const nn::Objective f = [&](std::span<const double> p, std::span<double> g) {
    return ae.example_loss(p, x, g);
  };
  EXPECT_LT(nn::grad_check(f, ae.parameters().values(), {1e-6, 0, 1}).max_relative_error, 1e-6);
}

TEST(AutoEncoder, SaveLoadRoundTrip) {
  AutoEncoder ae(9, 10, 7);
  ae.set_schema_fingerprint(0xabcdef);
  const std::string path = ::testing::TempDir() + "/ae_test.model";
  ae.save(path);
  const auto header = nn::read_model_file(path).header;
  EXPECT_EQ(header.at("kind"), "autoencoder");
  EXPECT_EQ(header.at("layer_widths"), nlohmann::json({9, 10, 9}));
  const auto back = AutoEncoder::load(path);
  EXPECT_EQ(back.schema_fingerprint(), 0xabcdefu);
  const std::vector<double> x(9, 1.0);
  EXPECT_EQ(back.encode(x).values, ae.encode(x).values);
  LstmEncoderDecoder lstm(9, 4, 3, 1);
  lstm.save(path);
  EXPECT_THROW(AutoEncoder::load(path), Error);
}

TEST(AutoEncoder, TrainingReducesLoss) {
  Rng rng(3);
  std::vector<data::ContextVector> corpus;
  for (int i = 0; i < 200; ++i) corpus.push_back({random_binary(rng, 8), i});
  nn::TrainingConfig cfg;
  cfg.batch_size = 32;
  cfg.iterations = 30;
  EncoderTrainingResult result;
  const auto ae = train_autoencoder(corpus, 4, cfg, &result);
  EXPECT_EQ(result.trace.epoch_loss.size(), 30u);
  EXPECT_LT(result.trace.epoch_loss.back(), result.trace.epoch_loss.front());
  EXPECT_GT(result.final_loss, 0.0);
  EXPECT_THROW(train_autoencoder({}, 4, cfg), EmptyCorpus);
  corpus.push_back({std::vector<double>(7), 0});
  EXPECT_THROW(train_autoencoder(corpus, 4, cfg), ShapeMismatch);
}

TEST(LstmEncDec, ShapesAndSlcSources) {
  Rng rng(4);
  const auto seq = make_sequence(rng, 3, 6);
  for (auto slc : {SlcSource::kEncoderHidden, SlcSource::kBottleneck, SlcSource::kHiddenAndCell}) {
    LstmEncoderDecoder m(6, 5, 3, 9, slc);
    EXPECT_EQ(parse_slc_source(slc_source_name(slc)), slc);
    const auto z = m.encode(seq);
    EXPECT_EQ(z.kind, LatentContext::Kind::kSequential);
    EXPECT_EQ(z.values.size(), m.slc_dim());
    const auto rec = m.reconstruct(seq);
    ASSERT_EQ(rec.size(), 3u);
    EXPECT_EQ(rec[2].size(), 6u);
  }
  LstmEncoderDecoder m(6, 5, 3, 9);
  EXPECT_EQ(m.slc_dim(), 5u);
  EXPECT_THROW(m.encode(make_sequence(rng, 2, 6)), ShapeMismatch);
  EXPECT_THROW(m.encode(make_sequence(rng, 3, 7)), ShapeMismatch);
}

// The encoder's final hidden state, checked against a direct LSTM unroll.
TEST(LstmEncDec, EncoderHiddenIsLastLstmState) {
  Rng rng(5);
  LstmEncoderDecoder m(4, 3, 4, 2);
  const auto seq = make_sequence(rng, 4, 4);
  const auto& ps = m.parameters();
  nn::LstmCell cell{4, 3, ps.info("encoder.weight").offset, ps.info("encoder.bias").offset};
  nn::LstmState s{std::vector<double>(3, 0.0), std::vector<double>(3, 0.0)};
  for (const auto& v : seq.vectors) s = nn::lstm_step(cell, ps.values(), v.values, s.h, s.c);
  const auto z = m.encode(seq).values;
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(z[j], s.h[j], 1e-12);
}

TEST(LstmEncDec, LossGradientMatchesFiniteDifferences) {
  Rng rng(6);
  LstmEncoderDecoder m(5, 3, 3, 4);
  std::vector<double> flat;
  for (const auto& v : make_sequence(rng, 3, 5).vectors) {
    flat.insert(flat.end(), v.values.begin(), v.values.end());
  }
  const nn::Objective f = [&](std::span<const double> p, std::span<double> g) {
    return m.example_loss(p, flat, g);
  };
  const auto r = nn::grad_check(f, m.parameters().values(), {1e-5, 0, 1});
  EXPECT_LT(r.max_relative_error, 1e-5) << m.parameters().owner_of(r.worst_index).name;
}

TEST(LstmEncDec, SaveLoadRoundTrip) {
  LstmEncoderDecoder m(7, 4, 5, 11, SlcSource::kBottleneck);
  m.set_schema_fingerprint(42);
  const std::string path = ::testing::TempDir() + "/lstm_test.model";
  m.save(path);
  const auto header = nn::read_model_file(path).header;
  EXPECT_EQ(header.at("sequence_length"), 5);
  EXPECT_EQ(header.at("slc_source"), "bottleneck");
  const auto back = LstmEncoderDecoder::load(path);
  EXPECT_EQ(back.sequence_length(), 5u);
  EXPECT_EQ(back.slc_source(), SlcSource::kBottleneck);
  EXPECT_EQ(back.schema_fingerprint(), 42u);
  Rng rng(8);
  const auto seq = make_sequence(rng, 5, 7);
  EXPECT_EQ(back.encode(seq).values, m.encode(seq).values);
}

TEST(LstmEncDec, TrainingRejectsBadCorpora) {
  nn::TrainingConfig cfg;
  cfg.iterations = 1;
  EXPECT_THROW(train_lstm_encdec({}, 3, cfg), EmptyCorpus);
  Rng rng(9);
  std::vector<data::ContextSequence> corpus = {make_sequence(rng, 3, 4), make_sequence(rng, 2, 4)};
  EXPECT_THROW(train_lstm_encdec(corpus, 3, cfg), RaggedSequences);
}

TEST(LstmEncDec, SameSeedSameModel) {
  Rng rng(10);
  std::vector<data::ContextSequence> corpus;
  for (int i = 0; i < 40; ++i) corpus.push_back(make_sequence(rng, 3, 4));
  nn::TrainingConfig cfg;
  cfg.batch_size = 8;
  cfg.iterations = 3;
  const auto a = train_lstm_encdec(corpus, 3, cfg);
  const auto b = train_lstm_encdec(corpus, 3, cfg);
  const auto pa = a.parameters().values();
  const auto pb = b.parameters().values();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) ASSERT_EQ(pa[i], pb[i]);
}

}  // namespace
}  // namespace ctxrec::encoders
