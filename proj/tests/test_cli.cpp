/*
 * Copyright 2026 The lmboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lmboost/cli.hpp"
#include "lmboost/error.hpp"
#include "lmboost/ingest.hpp"

namespace lmboost {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.starts_with("#")) lines.push_back(line);
  }
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lmboost_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  // simulate -> landmark -> fit into dir_.
  void pipeline(const std::string& model = "model.txt") {
    ASSERT_EQ(run({"simulate", "--scenario", "1", "--n", "150", "--seed", "7",
                   "--out", path("sim.csv")}),
              0)
        << err_.str();
    ASSERT_EQ(run({"landmark", "--data", path("sim.csv"), "--Q", "2", "--t-step",
                   "0.1", "--seed", "7", "--out", path("table.csv")}),
              0)
        << err_.str();
    ASSERT_EQ(run({"fit", "--table", path("table.csv"), "--nrounds", "8", "--max-depth",
                   "2", "--seed", "7", "--out", path(model)}),
              0)
        << err_.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(CliHelpers, ParseUintList) {
  EXPECT_EQ(cli::parse_uint_list("1..5"), (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(cli::parse_uint_list("100,1000"), (std::vector<std::uint64_t>{100, 1000}));
  EXPECT_EQ(cli::parse_uint_list("1..3,10"), (std::vector<std::uint64_t>{1, 2, 3, 10}));
  EXPECT_THROW(cli::parse_uint_list("5..1"), InvalidArgument);
  EXPECT_THROW(cli::parse_uint_list("a"), InvalidArgument);
  EXPECT_THROW(cli::parse_uint_list(""), InvalidArgument);
}

TEST(CliHelpers, Fnv1aVectors) {
  EXPECT_EQ(cli::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(cli::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(cli::fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST_F(CliTest, SimulateWritesSubjectsWithHeader) {
  ASSERT_EQ(run({"simulate", "--scenario", "1", "--n", "100", "--seed", "7", "--out",
                 path("a.csv")}),
            0);
  const std::string text = slurp(path("a.csv"));
  const std::string first = text.substr(0, text.find('\n'));
  EXPECT_TRUE(std::regex_match(
      first, std::regex("# lmboost 0\\.1\\.0 command=simulate config=[0-9a-f]{16} seed=7")))
      << first;
  CategoricalDictionary dict;
  std::istringstream in(text);
  const auto subjects = read_longitudinal_csv(
      in, LongitudinalSchema::simulated({"w_1", "w_2", "w_3"}, 1.0), dict);
  EXPECT_EQ(subjects.size(), 100u);
  EXPECT_NE(out_.str().find("simulate"), std::string::npos);
}

TEST_F(CliTest, ConfigErrors) {
  EXPECT_EQ(run({"simulate", "--n", "10", "--out", path("a.csv")}), cli::kExitConfig);
  EXPECT_EQ(run({"simulate", "--n", "10", "--seed", "1", "--bogus", "3"}),
            cli::kExitConfig);
  EXPECT_EQ(run({"frobnicate"}), cli::kExitConfig);
  EXPECT_EQ(run({}), cli::kExitConfig);
  EXPECT_EQ(run({"simulate", "--n", "10", "--seed", "1", "--scenario", "9"}),
            cli::kExitConfig);
  std::ofstream(path("bad.ini")) << "[simulate]\nn=10\nseed=1\nunknown_key=4\n";
  EXPECT_EQ(run({"simulate", "--config", path("bad.ini"), "--out", path("a.csv")}),
            cli::kExitConfig);
}

TEST_F(CliTest, ConfigFileFlagsAndEnvironment) {
  std::ofstream(path("run.ini")) << "[simulate]\nn=12\nseed=3\nscenario=2\n";
  ASSERT_EQ(run({"simulate", "--config", path("run.ini"), "--out", path("c.csv")}), 0)
      << err_.str();
  ASSERT_EQ(run({"simulate", "--scenario", "2", "--n", "12", "--seed", "3", "--out",
                 path("f.csv")}),
            0);
  EXPECT_EQ(data_lines(slurp(path("c.csv"))), data_lines(slurp(path("f.csv"))));

  ASSERT_EQ(run({"simulate", "--config", path("run.ini"), "--n", "5", "--out",
                 path("o.csv")}),
            0);
  std::set<std::string> ids;
  const auto lines = data_lines(slurp(path("o.csv")));
  for (std::size_t i = 1; i < lines.size(); ++i) ids.insert(lines[i].substr(0, lines[i].find(',')));
  EXPECT_EQ(ids.size(), 5u);

  ::setenv("LMBOOST_N", "4", 1);
  ASSERT_EQ(run({"simulate", "--seed", "3", "--out", path("e.csv")}), 0);
  ::unsetenv("LMBOOST_N");
  ids.clear();
  const auto env_lines = data_lines(slurp(path("e.csv")));
  for (std::size_t i = 1; i < env_lines.size(); ++i) {
    ids.insert(env_lines[i].substr(0, env_lines[i].find(',')));
  }
  EXPECT_EQ(ids.size(), 4u);
}

TEST_F(CliTest, FitIsReproducibleAndPredicts) {
  pipeline("m1.txt");
  ASSERT_EQ(run({"fit", "--table", path("table.csv"), "--nrounds", "8", "--max-depth",
                 "2", "--seed", "7", "--out", path("m2.txt")}),
            0);
  EXPECT_EQ(slurp(path("m1.txt")), slurp(path("m2.txt")));

  std::ofstream(path("q.csv")) << "s,t,w_1,w_2,w_3\n0.2,0.9,1,0,0.5\n0.5,0.5,0,1,\n";
  ASSERT_EQ(run({"predict", "--model", path("m1.txt"), "--queries", path("q.csv"),
                 "--out", path("p.csv")}),
            0)
      << err_.str();
  const auto lines = data_lines(slurp(path("p.csv")));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "s,t,w_1,w_2,w_3,log_hazard,survival");
  EXPECT_TRUE(lines[2].ends_with(",1")) << lines[2];

  ASSERT_EQ(run({"predict", "--model", path("m1.txt"), "--queries", path("q.csv"),
                 "--bootstrap", "3", "--data", path("sim.csv"), "--Q", "2", "--t-step",
                 "0.1", "--nrounds", "3", "--seed", "2", "--out", path("pb.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(data_lines(slurp(path("pb.csv")))[0],
            "s,t,w_1,w_2,w_3,log_hazard,survival,survival_lo,survival_hi");
}

TEST_F(CliTest, ExplainCommands) {
  pipeline();
  ASSERT_EQ(run({"importance", "--model", path("model.txt"), "--out", path("i.csv")}), 0);
  EXPECT_EQ(data_lines(slurp(path("i.csv"))).size(), 6u);
  ASSERT_EQ(run({"pdp", "--model", path("model.txt"), "--table", path("table.csv"),
                 "--feature", "w_3", "--points", "5", "--rug-out", path("r.csv"), "--out",
                 path("pdp.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(data_lines(slurp(path("pdp.csv"))).size(), 6u);
  EXPECT_EQ(data_lines(slurp(path("r.csv")))[0], "feature,value");
  ASSERT_EQ(run({"marginal", "--model", path("model.txt"), "--table", path("table.csv"),
                 "--feature", "s", "--bins", "4", "--out", path("mg.csv")}),
            0);
  EXPECT_EQ(data_lines(slurp(path("mg.csv"))).size(), 5u);
  EXPECT_EQ(run({"pdp", "--model", path("model.txt"), "--table", path("table.csv"),
                 "--feature", "nope", "--out", path("x.csv")}),
            cli::kExitConfig);
}

TEST_F(CliTest, CvAndEvaluate) {
  pipeline();
  ASSERT_EQ(run({"cv", "--table", path("table.csv"), "--folds", "3", "--max-rounds", "5",
                 "--seed", "1", "--out", path("cv.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(data_lines(slurp(path("cv.csv"))).size(), 7u);
  ASSERT_EQ(run({"evaluate", "--model", path("model.txt"), "--scenario", "1", "--n-test",
                 "20", "--oracle-sims", "100", "--n", "150", "--Q", "2", "--metric", "both",
                 "--seed", "5", "--out", path("ev.csv")}),
            0)
      << err_.str();
  const auto lines = data_lines(slurp(path("ev.csv")));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "scenario,n,Q,seed,metric,value");
  EXPECT_TRUE(lines[1].starts_with("1,150,2,5,rmse,"));
  EXPECT_TRUE(lines[2].starts_with("1,150,2,5,mape,"));
}

TEST_F(CliTest, DataAndDegenerateErrors) {
  std::ofstream(path("bad.csv")) << "id,visit,exit,status,censor,w_1,w_2,w_3\n"
                                 << "1,0,0.5,event,1,x,0,0\n";
  EXPECT_EQ(run({"landmark", "--data", path("bad.csv"), "--seed", "1", "--out",
                 path("t.csv")}),
            cli::kExitData);
  EXPECT_EQ(run({"fit", "--table", path("missing.csv"), "--seed", "1"}), cli::kExitData);

  std::ofstream(path("none.csv")) << "id,visit,exit,status,censor,w_1,w_2,w_3\n"
                                  << "1,0,1,censored,1,0,0,0\n"
                                  << "2,0,1,censored,1,1,0,0\n";
  ASSERT_EQ(run({"landmark", "--data", path("none.csv"), "--seed", "1", "--out",
                 path("t.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(run({"fit", "--table", path("t.csv"), "--seed", "1", "--out", path("m.txt")}),
            cli::kExitDegenerate);
  EXPECT_NE(err_.str().find("occ"), std::string::npos) << err_.str();
}

TEST_F(CliTest, ReplicateStudyGrid) {
  ASSERT_EQ(run({"replicate-study", "--scenario", "1", "--n", "100,200", "--Q", "1,2",
                 "--seeds", "1..5", "--n-test", "10", "--oracle-sims", "50", "--max-rounds",
                 "3", "--folds", "2", "--t-step", "0.1", "--out", path("st.csv")}),
            0)
      << err_.str();
  const auto lines = data_lines(slurp(path("st.csv")));
  ASSERT_EQ(lines.size(), 21u);
  EXPECT_EQ(lines[0], "scenario,n,Q,seed,metric,value");
}

TEST_F(CliTest, PbcLandmarkVisitScheme) {
  ASSERT_EQ(run({"landmark", "--data", std::string(LMBOOST_DATA_DIR) + "/pbc2.csv",
                 "--format", "pbc2", "--scheme", "visit", "--Q", "2", "--t-step", "0.5",
                 "--dict", path("dict.csv"), "--seed", "1", "--out", path("pt.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(data_lines(slurp(path("dict.csv")))[0], "column,level,code");
  EXPECT_EQ(data_lines(slurp(path("pt.csv")))[0].substr(0, 10), "t,s,drug,a");
}

}  // namespace
}  // namespace lmboost
