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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctxrec/cli/commands.hpp"
#include "ctxrec/common/errors.hpp"
#include "ctxrec/nn/model_file.hpp"

namespace ctxrec::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(kOutputDirEnv);
  }

  json small_config(const std::string& out) const {
    return {{"output_dir", (dir_ / out).string()},
            {"seeds", {1}},
            {"data",
             {{"source", "synth"},
              {"schema", std::string(CTXREC_SOURCE_DIR) + "/configs/yelp_schema.json"},
              {"synth", {{"n_users", 12}, {"n_items", 30}, {"n_interactions", 400}}}}},
            {"encoder",
             {{"latent_dim", 10},
              {"sequence_length", 5},
              {"training", {{"batch_size", 64}, {"iterations", 4}}}}},
            {"recommender",
             {{"mode", "latent_current"},
              {"tower", {8, 4}},
              {"training", {{"batch_size", 64}, {"iterations", 3}}}}},
            {"eval", {{"ks", {1, 3}}, {"n_negatives", 10}}},
            {"sweep", {{"lengths", {1, 2}}}}};
  }

  std::string write_config(const json& j, const std::string& name = "run.json") const {
    const std::string path = (dir_ / name).string();
    std::ofstream(path) << j.dump(2);
    return path;
  }

  int invoke(std::vector<std::string> args) {
    std::vector<const char*> argv = {"ctxrec"};
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SynthWritesReadableDeterministicFiles) {
  const auto cfg = write_config(small_config("a"));
  ASSERT_EQ(invoke({"--config", cfg, "synth"}), 0) << err_.str();
  const auto csv = (dir_ / "a/data/interactions.csv").string();
  const auto schema = (dir_ / "a/data/schema.json").string();
  ASSERT_TRUE(fs::exists(csv));
  const auto doc = data::load_schema(schema);
  EXPECT_EQ(doc.features.width(), 9u);
  EXPECT_EQ(data::load_interactions(csv, doc).size(), 400u);
  EXPECT_TRUE(fs::exists(dir_ / "a/config.json"));

  ASSERT_EQ(invoke({"--config", cfg, "--out", (dir_ / "b").string(), "synth"}), 0);
  EXPECT_EQ(nn::file_digest(csv), nn::file_digest((dir_ / "b/data/interactions.csv").string()));
}

TEST_F(CliTest, NormalizedConfigParsesBack) {
  const auto cfg = load_run_config(write_config(small_config("a")));
  const auto again = parse_run_config(run_config_to_json(cfg));
  EXPECT_EQ(run_config_to_json(again), run_config_to_json(cfg));
  EXPECT_EQ(cfg.pipeline.encoder.training.batch_size, 64u);
  EXPECT_EQ(cfg.pipeline.rec_training.base_lr, 0.01);
}

TEST_F(CliTest, TrainEncoderRecordsWidthsAndTrace) {
  const auto cfg = write_config(small_config("a"));
  ASSERT_EQ(invoke({"--config", cfg, "train-encoder"}), 0) << err_.str();
  const auto paths = stage_paths(load_run_config(cfg), 1);
  const auto header = nn::read_model_file(paths.encoder_model).header;
  EXPECT_EQ(header.at("layer_widths"), json({9, 10, 9}));

  std::ifstream trace(paths.encoder_trace);
  std::string line;
  std::getline(trace, line);
  EXPECT_EQ(line, "epoch,loss");
  int epochs = 0;
  while (std::getline(trace, line)) {
    ++epochs;
    EXPECT_TRUE(std::isfinite(std::stod(line.substr(line.find(',') + 1))));
  }
  EXPECT_EQ(epochs, 4);

  ASSERT_EQ(invoke({"--config", cfg, "train-encoder"}), 0);
  EXPECT_NE(out_.str().find("cached"), std::string::npos);

  ASSERT_EQ(invoke({"--config", cfg, "--out", (dir_ / "b").string(), "train-encoder"}), 0);
  auto other = load_run_config(cfg);
  other.output_dir = (dir_ / "b").string();
  EXPECT_EQ(slurp(paths.encoder_model), slurp(stage_paths(other, 1).encoder_model));
}

TEST_F(CliTest, EvalReportsConfiguredMetrics) {
  const auto cfg = write_config(small_config("a"));
  ASSERT_EQ(invoke({"--config", cfg, "eval"}), 0) << err_.str();
  const auto report = json::parse(slurp((dir_ / "a/report.json").string()));
  ASSERT_EQ(report.size(), 1u);
  EXPECT_TRUE(report[0].at("hits").contains("hit@1"));
  EXPECT_TRUE(report[0].at("hits").contains("hit@3"));
  EXPECT_FALSE(report[0].at("hits").contains("hit@5"));
  const auto csv = slurp((dir_ / "a/report.csv").string());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "seed,rmse,mae,hit@1,hit@3,n_test,n_ranked,n_skipped");

  ASSERT_EQ(invoke({"--config", cfg, "extract"}), 0) << err_.str();
  const auto contexts = slurp(stage_paths(load_run_config(cfg), 1).contexts);
  EXPECT_EQ(contexts.substr(0, contexts.find('\n')),
            "timestamp,user_id,item_id,z0,z1,z2,z3,z4,z5,z6,z7,z8,z9");
}

TEST_F(CliTest, SweepWritesOneRowPerSeedAndLength) {
  auto j = small_config("a");
  j["seeds"] = {1, 2};
  const auto cfg = write_config(j);
  ASSERT_EQ(invoke({"--config", cfg, "sweep"}), 0) << err_.str();
  std::ifstream in(dir_ / "a/sweep.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "L,rmse,mae,seed");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line.substr(0, line.find(',')));
  EXPECT_EQ(rows, (std::vector<std::string>{"1", "2", "1", "2"}));
}

TEST_F(CliTest, PredictScoresRows) {
  auto j = small_config("a");
  j["recommender"]["mode"] = "latent_sequential";
  const auto cfg = write_config(j);
  const auto input = (dir_ / "requests.csv").string();
  std::ofstream(input) << "user_id,item_id,time,location,day_type,holiday,season\n"
                          "u0,i1,13,0.5,weekday,0,summer\n"
                          "u1,i2,20,0.1,weekend,1,winter\n";
  const auto output = (dir_ / "pred.csv").string();
  ASSERT_EQ(invoke({"--config", cfg, "predict", "--input", input, "--output", output}), 0)
      << err_.str();
  std::ifstream in(output);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "user_id,item_id,prediction");
  int n = 0;
  while (std::getline(in, line)) {
    const double p = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_GE(p, 1.0);
    EXPECT_LE(p, 5.0);
    ++n;
  }
  EXPECT_EQ(n, 2);

  std::ofstream(input) << "user_id,item_id,time,location,day_type,holiday,season\n"
                          "nobody,i1,13,0.5,weekday,0,summer\n";
  EXPECT_EQ(invoke({"--config", cfg, "predict", "--input", input, "--output", output}), 4);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  const auto cfg = write_config(small_config("a"));
  setenv(kOutputDirEnv, (dir_ / "env").string().c_str(), 1);
  EXPECT_EQ(invoke({"--config", cfg, "synth"}), 0);
  unsetenv(kOutputDirEnv);
  EXPECT_TRUE(fs::exists(dir_ / "env/data/interactions.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "a"));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(invoke({"--help"}), 0);
  EXPECT_EQ(invoke({"--config", (dir_ / "missing.json").string(), "eval"}), 2);
  EXPECT_EQ(invoke({"--config", write_config(small_config("a")), "frobnicate"}), 2);

  auto j = small_config("a");
  j["encoder"]["dropout"] = 0.5;
  EXPECT_EQ(invoke({"--config", write_config(j), "eval"}), 2);
  EXPECT_NE(err_.str().find("dropout"), std::string::npos);

  j = small_config("a");
  j["recommender"]["mode"] = "none";
  EXPECT_EQ(invoke({"--config", write_config(j), "train-encoder"}), 2);

  j = small_config("a");
  j.erase("encoder");
  EXPECT_EQ(invoke({"--config", write_config(j), "eval"}), 2);

  j = small_config("a");
  j["recommender"]["training"]["base_lr"] = 1e300;
  j["recommender"]["training"]["floor_lr"] = 1e300;
  EXPECT_EQ(invoke({"--config", write_config(j), "train-rec"}), 3) << err_.str();

  const auto csv = (dir_ / "bad.csv").string();
  std::ofstream(csv) << "timestamp,user_id,item_id,rating,time,location,day_type,holiday,season\n"
                        "1,u,i,3,12,0.5,someday,0,summer\n";
  j = small_config("a");
  j["data"] = {{"source", "csv"},
               {"path", csv},
               {"schema", std::string(CTXREC_SOURCE_DIR) + "/configs/yelp_schema.json"}};
  EXPECT_EQ(invoke({"--config", write_config(j), "eval"}), 4);
  EXPECT_NE(err_.str().find("someday"), std::string::npos) << err_.str();
}

TEST_F(CliTest, BinaryExitCodeMatches) {
  auto j = small_config("a");
  j["split"] = {{"train_fraction", 1.5}};
  const std::string cmd =
      std::string(CTXREC_CLI_PATH) + " --config " + write_config(j) + " eval 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

}  // namespace
}  // namespace ctxrec::cli
