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
#include <string>
#include <vector>

#include "lmboost/core_types.hpp"
#include "lmboost/rng.hpp"

namespace lmboost {

enum class ScenarioKind {
  kLinear,              // Scenario 1: log-linear Markovian hazard.
  kNonlinearNonMarkov,  // Scenario 2: depends on W3 before the last change.
  kHighDim,             // Scenario 3: Scenario 1 plus 47 noise covariates.
  kConstantHazard,      // alpha = c, one irrelevant binary covariate.
  kTwoStateMarkov,      // alpha = a + b W, W in {0, 1} flipping at a rate.
};

// Hazard functional plus covariate and censoring dynamics.
struct Scenario {
  static constexpr std::size_t kNoiseCovariates = 47;

  ScenarioKind kind = ScenarioKind::kLinear;
  std::size_t p = 3;
  double lambda_c = 0.2;  // censoring rate, per year
  double lambda_w = 2.0;  // covariate update rate, per year
  double horizon = 1.0;   // T, years

  double constant_rate = 0.0;  // ConstantHazard
  double markov_a = 0.0;       // TwoStateMarkov
  double markov_b = 0.0;
  // HighDim: a 47x47 factor A (row-major) with Sigma = A A^T. Noise draws
  // are A z with z standard normal.
  std::vector<double> sigma_factor;

  static Scenario linear();
  static Scenario nonlinear_non_markov();
  // Draws A once from the dataset stream.
  static Scenario high_dim(const RngStream& dataset_stream);
  static Scenario constant_hazard(double c);
  // The covariate flips at `flip_rate`, stored in lambda_w.
  static Scenario two_state_markov(double a, double b, double flip_rate);

  void validate() const;
  std::vector<std::string> covariate_names() const;
  std::string name() const;
  // True when the future conditional hazard has a closed form.
  bool has_analytic_oracle() const;
};

// Majorant of the hazard used by thinning.
struct HazardEnvelope {
  double bound = 0.0;
};

// alpha{t, W-bar(t)} for the scenario, reading W(t) and, for Scenario 2,
// W3 just before the most recent change (W3(0-) = 0).
double scenario_hazard(const Scenario& scenario, double t,
                       const CovariatePath& path);

// Closed-form supremum of the hazard over [from, to] while the covariates
// stay at the path segment active at `from`.
HazardEnvelope segment_envelope(const Scenario& scenario,
                                const CovariatePath& path, double from,
                                double to);

// Simulates one subject on [0, horizon]. The covariate path is the latent
// path on the whole window; events are drawn by thinning, segment by
// segment, and censor_time = min(Exp(lambda_c), horizon).
SubjectRecord simulate_subject(const Scenario& scenario, std::int64_t id,
                               const RngStream& stream);

// Subjects 1..n, each on its own substream of `stream`.
std::vector<SubjectRecord> simulate_cohort(const Scenario& scenario,
                                           std::size_t n,
                                           const RngStream& stream);

// Monte Carlo probability of surviving past `horizon` given survival to s
// and the covariate history `path` up to s, with lambda_c = 0.
double oracle_survival(const Scenario& scenario, double s,
                       const CovariatePath& path, double horizon,
                       std::size_t n_sims, const RngStream& stream);

// Exact survival for ConstantHazard and TwoStateMarkov given W(s) = w.
// TwoStateMarkov uses the matrix exponential of the 2x2 sub-generator of
// the (alive, W) chain.
double analytic_survival(const Scenario& scenario, double s, double w,
                         double horizon);

// True future conditional hazard lambda(t, s, w) for the analytic
// scenarios.
double true_future_hazard(const Scenario& scenario, double t, double s,
                          double w);

}  // namespace lmboost
