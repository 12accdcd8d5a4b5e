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

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lmboost/error.hpp"
#include "lmboost/ingest.hpp"
#include "lmboost/landmark.hpp"
#include "lmboost/rng.hpp"
#include "lmboost/simulate.hpp"

namespace lmboost {
namespace {

const std::string kPbc2 = std::string(LMBOOST_DATA_DIR) + "/pbc2.csv";

LongitudinalSchema tiny_schema() {
  LongitudinalSchema schema;
  schema.covariates = {{"x", ColumnKind::kNumeric}, {"grp", ColumnKind::kCategorical}};
  schema.horizon = 10.0;
  return schema;
}

std::vector<SubjectRecord> read_text(const std::string& text,
                                     const LongitudinalSchema& schema,
                                     CategoricalDictionary& dict) {
  std::istringstream in(text);
  return read_longitudinal_csv(in, schema, dict);
}

std::string error_of(const std::string& text) {
  CategoricalDictionary dict;
  try {
    read_text(text, tiny_schema(), dict);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(ReadLongitudinal, SingleVisit) {
  CategoricalDictionary dict;
  const auto subjects =
      read_text("id,visit,exit,status,x,grp\n7,0,3.5,censored,1.25,a\n", tiny_schema(), dict);
  ASSERT_EQ(subjects.size(), 1u);
  const auto& s = subjects[0];
  EXPECT_EQ(s.id(), 7);
  EXPECT_EQ(s.path().jump_times(), std::vector<double>{0.0});
  EXPECT_FALSE(s.has_event());
  EXPECT_EQ(s.exit_time(), 3.5);
  EXPECT_EQ(*s.path().values()[0][0], 1.25);
  EXPECT_EQ(*s.path().values()[0][1], 0.0);
  EXPECT_EQ(dict.at("grp"), std::vector<std::string>{"a"});
}

TEST(ReadLongitudinal, GroupsSortsAndCarriesForward) {
  CategoricalDictionary dict;
  const auto subjects = read_text(
      "id,visit,exit,status,x,grp\n"
      "2,1.5,4,event,3,b\n"
      "1,0,2,censored,1,a\n"
      "2,0,4,event,2,a\n"
      "2,0.5,4,event,,b\n",
      tiny_schema(), dict);
  ASSERT_EQ(subjects.size(), 2u);
  EXPECT_EQ(subjects[0].id(), 1);
  const auto& s = subjects[1];
  EXPECT_EQ(s.path().jump_times(), (std::vector<double>{0.0, 0.5, 1.5}));
  EXPECT_EQ(s.event_time(), 4.0);
  EXPECT_EQ(*value_at(s.path(), 1.2)[1], 0.0);
  EXPECT_EQ(*value_at(s.path(), 0.2)[1], 1.0);
  EXPECT_FALSE(value_at(s.path(), 1.2)[0].has_value());
  EXPECT_EQ(*value_at(s.path(), 0.49)[0], 2.0);
  EXPECT_EQ(*value_at(s.path(), 3.0)[0], 3.0);
  EXPECT_EQ(visit_times(s), (std::vector<double>{0.5, 1.5}));
  EXPECT_EQ(dict.at("grp"), (std::vector<std::string>{"b", "a"}));
}

TEST(ReadLongitudinal, LateFirstVisitGetsMissingSegment) {
  CategoricalDictionary dict;
  const auto s = read_text("id,visit,exit,status,x,grp\n1,0.4,2,censored,1,a\n",
                           tiny_schema(), dict)[0];
  EXPECT_EQ(s.path().jump_times(), (std::vector<double>{0.0, 0.4}));
  EXPECT_FALSE(value_at(s.path(), 0.1)[0].has_value());
}

TEST(ReadLongitudinal, MissingToken) {
  auto schema = tiny_schema();
  schema.missing_token = "NA";
  CategoricalDictionary dict;
  const auto s = read_text("id,visit,exit,status,x,grp\n1,0,2,censored,NA,NA\n", schema, dict)[0];
  EXPECT_FALSE(s.path().values()[0][0].has_value());
  EXPECT_FALSE(s.path().values()[0][1].has_value());
}

TEST(ReadLongitudinal, Errors) {
  EXPECT_NE(error_of("id,visit,exit,status,x,grp\n1,0,2,censored,1,a\n1,0,2,censored,2,a\n")
                .find("subject 1"),
            std::string::npos);
  EXPECT_NE(error_of("id,visit,exit,status,x,grp\n1,0,2,censored,1,a\n1,1,2,censored,abc,a\n")
                .find("row 3"),
            std::string::npos);
  EXPECT_NE(error_of("id,visit,exit,status,x,grp\n1,0,2,censored,1,a\n1,1,3,censored,1,a\n"),
            "");
  EXPECT_NE(error_of("id,visit,exit,status,grp\n1,0,2,censored,a\n"), "");
  EXPECT_NE(error_of("id,visit,exit,status,x,grp\n1,0,2,censored,1\n"), "");
  CategoricalDictionary dict;
  EXPECT_THROW(read_longitudinal_csv("/nonexistent.csv", tiny_schema(), dict), DataError);
}

TEST(Dictionary, RoundTripAndReuse) {
  CategoricalDictionary dict{{"grp", {"b", "a"}}, {"sex", {"female", "male"}}};
  std::stringstream out;
  write_dictionary(out, dict);
  EXPECT_EQ(read_dictionary(out), dict);

  CategoricalDictionary seeded{{"grp", {"z", "a"}}};
  const auto s = read_text("id,visit,exit,status,x,grp\n1,0,2,censored,1,a\n",
                           tiny_schema(), seeded)[0];
  EXPECT_EQ(*s.path().values()[0][1], 1.0);
  std::stringstream bad("column,level,code\ngrp,a,1\n");
  EXPECT_THROW(read_dictionary(bad), DataError);
}

TEST(ReadLongitudinal, SimulatedRoundTrip) {
  for (const auto& sc : {Scenario::linear(), Scenario::nonlinear_non_markov()}) {
    const auto cohort = simulate_cohort(sc, 200, RngStream(12));
    std::stringstream text;
    write_longitudinal_csv(text, cohort, sc.covariate_names(), {"seed=12"});
    CategoricalDictionary dict;
    const auto back = read_longitudinal_csv(
        text, LongitudinalSchema::simulated(sc.covariate_names(), sc.horizon), dict);
    ASSERT_EQ(back.size(), cohort.size());
    for (std::size_t i = 0; i < cohort.size(); ++i) EXPECT_EQ(back[i], cohort[i]) << i;
  }
}

TEST(VisitUniformity, KnownValues) {
  auto subj = [](std::vector<double> jumps) {
    std::vector<CovariateVector> values(jumps.size(), CovariateVector{1.0});
    return SubjectRecord(1, CovariatePath(std::move(jumps), std::move(values)), 1.0,
                         1.0, 2.0);
  };
  std::vector<SubjectRecord> one{subj({0.0, 0.5})};
  EXPECT_DOUBLE_EQ(visit_uniformity_ks(one), 0.5);
  std::vector<SubjectRecord> two{subj({0.0, 0.25, 0.75})};
  EXPECT_DOUBLE_EQ(visit_uniformity_ks(two), 0.25);
  std::vector<SubjectRecord> none{subj({0.0})};
  EXPECT_THROW(visit_uniformity_ks(none), InvalidArgument);
}

// Counts taken directly from the leading id, status and year columns.
struct Pbc2Counts {
  std::map<std::string, std::set<std::string>> ids_by_status;
  std::size_t later_visits = 0;
};

Pbc2Counts count_pbc2() {
  std::ifstream in(kPbc2);
  std::string line;
  std::getline(in, line);
  Pbc2Counts counts;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < 7 && std::getline(ss, cell, ','); ++k) f.push_back(cell);
    counts.ids_by_status[f[2]].insert(f[0]);
    if (std::stod(f[6]) > 0.0) ++counts.later_visits;
  }
  return counts;
}

TEST(Pbc2, PublishedCounts) {
  CategoricalDictionary dict;
  const auto subjects = read_longitudinal_csv(kPbc2, LongitudinalSchema::pbc2(), dict);
  EXPECT_EQ(subjects.size(), 312u);
  std::size_t events = 0, visits = 0;
  for (const auto& s : subjects) {
    events += s.has_event();
    visits += visit_times(s).size();
    EXPECT_EQ(s.horizon(), 14.31);
  }
  EXPECT_EQ(events, 169u);
  EXPECT_EQ(visits, 1633u);

  const auto counts = count_pbc2();
  EXPECT_EQ(counts.ids_by_status.at("alive").size(), 143u);
  EXPECT_EQ(counts.ids_by_status.at("transplanted").size(), 29u);
  EXPECT_EQ(counts.ids_by_status.at("dead").size(), 140u);
  EXPECT_EQ(counts.later_visits, 1633u);
  EXPECT_EQ(dict.at("sex").size(), 2u);

  const double ks = visit_uniformity_ks(subjects);
  EXPECT_GT(ks, 0.0);
  EXPECT_LT(ks, 1.0);
}

TEST(Schema, Validate) {
  auto schema = tiny_schema();
  schema.covariates.push_back({"x", ColumnKind::kNumeric});
  EXPECT_THROW(schema.validate(), InvalidArgument);
  schema = tiny_schema();
  schema.id_column = "";
  EXPECT_THROW(schema.validate(), InvalidArgument);
  EXPECT_EQ(LongitudinalSchema::pbc2().covariates.size(), 15u);
}

}  // namespace
}  // namespace lmboost
