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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lmboost/boost.hpp"
#include "lmboost/core_types.hpp"
#include "lmboost/landmark.hpp"
#include "lmboost/rng.hpp"
#include "lmboost/simulate.hpp"

namespace lmboost {

// A simulated subject seen at landmark s, with its history up to s.
struct TestPoint {
  std::int64_t subject_id = 0;
  double s = 0.0;
  CovariatePath history;
  CovariateVector w;
  double oracle = 0.0;     // S*(T | s, history)
  double predicted = 0.0;  // S-hat(T | s, W(s)), filled by predict_test_set
};

// Draws subjects and Unif(0, T) landmarks until n_target pairs with
// exit > s are kept. Candidate k uses substream (kTestSet, k). Oracles are
// analytic when the scenario allows, otherwise Monte Carlo with n_sims.
std::vector<TestPoint> build_test_set(const Scenario& scenario,
                                      std::size_t n_target,
                                      std::size_t n_sims,
                                      const RngStream& stream);

void predict_test_set(const BoostModel& model, double horizon,
                      std::span<TestPoint> points);

enum class Metric { kRmse, kMape };

std::string to_string(Metric metric);
Metric parse_metric(const std::string& text);

// RMSE = sqrt(mean (S-hat - S*)^2); MAPE = mean |S-hat - S*| / S*.
double score(std::span<const TestPoint> points, Metric metric);

// Exposure-weighted (t, s, w) points of an occurrence/exposure table.
struct EmpiricalMeasure {
  std::vector<CovariateVector> points;
  std::vector<double> weights;
};

EmpiricalMeasure empirical_measure(const OccExpTable& table);

using LogHazardFn = std::function<double(std::span<const Covariate>)>;

// Weighted mean of |F-hat(x) - truth(x)| under the measure.
double l1_mu_error(const BoostModel& model, const LogHazardFn& truth,
                   const EmpiricalMeasure& measure);

// Fraction of measure weight where |exp(F-hat) / exp(truth) - 1| <= rel_tol.
double mu_mass_within(const BoostModel& model, const LogHazardFn& truth,
                      const EmpiricalMeasure& measure, double rel_tol);

// Log of the true future conditional hazard at a feature vector, for the
// analytic scenarios.
LogHazardFn true_log_hazard(const Scenario& scenario);

// Scenario by name ("1", "2", "3", "constant", "markov") with extra
// parameters for the analytic ones. Scenario 3 draws its noise factor from
// the dataset stream.
Scenario make_scenario(const std::string& name, const RngStream& dataset,
                       double constant_rate = 0.5, double markov_a = 0.2,
                       double markov_b = 0.6, double markov_flip = 2.0);

// Hyperparameters used for a scenario's landmark model in the study.
BoostParams study_params(ScenarioKind kind);

// One (scenario, n, Q, seed) cell of the simulation study.
struct StudySettings {
  std::string scenario = "1";
  std::size_t n = 1000;
  int Q = 1;
  std::uint64_t seed = 1;
  std::size_t test_size = 1000;
  std::size_t oracle_sims = 10000;
  double t_step = 0.01;
  double s_step = 0.0;  // 0 keeps landmark times raw
  int cv_folds = 5;
  int max_rounds = 300;  // 0 disables CV and uses params.nrounds
  BoostParams params;
};

struct StudyFit {
  Scenario scenario;
  BoostModel model;
  int nrounds = 0;
};

// Simulates the training cohort from RngStream(seed), draws Q landmarks
// per subject, selects nrounds by subject-level CV and refits.
StudyFit fit_study_model(const StudySettings& settings);

struct StudyResult {
  double rmse = 0.0;
  double mape = 0.0;
  int nrounds = 0;
};

// Fits a cell and scores it on a test set drawn from RngStream(seed), so
// the test set is shared by all n and Q with the same seed.
StudyResult run_study_cell(const StudySettings& settings);

// Same, reusing a prebuilt test set.
StudyResult run_study_cell(const StudySettings& settings,
                           std::vector<TestPoint> test_set);

}  // namespace lmboost
