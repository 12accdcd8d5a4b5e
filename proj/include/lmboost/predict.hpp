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
#include <span>
#include <string>
#include <vector>

#include "lmboost/boost.hpp"
#include "lmboost/core_types.hpp"
#include "lmboost/landmark.hpp"
#include "lmboost/rng.hpp"

namespace lmboost {

struct SurvivalCurve {
  double s = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
};

// Model input for (t, s, w): each coordinate replaced by its cell
// representative and t raised to at least s, as in the training table.
CovariateVector model_input(const BoostModel& model, double t, double s,
                            std::span<const Covariate> w);

// Capped log-hazard at (t, s, w). Requires s <= t.
double predict_log_hazard(const BoostModel& model, double t, double s,
                          std::span<const Covariate> w);

// Integral of exp(F) over (s, horizon], exact for the piecewise-constant
// model: one term per time bin overlapping the interval.
double cumulative_hazard(const BoostModel& model, double s,
                         std::span<const Covariate> w, double horizon);

double predict_survival(const BoostModel& model, double s,
                        std::span<const Covariate> w, double horizon);

SurvivalCurve predict_survival_curve(const BoostModel& model, double s,
                                     std::span<const Covariate> w,
                                     std::span<const double> grid);

// Refits on B subject-level resamples (with replacement) of `subjects`.
// Resampled copies get fresh ids so landmark draws stay distinct.
std::vector<BoostModel> bootstrap_models(
    std::span<const SubjectRecord> subjects, const LandmarkScheme& scheme,
    const Partition& partition, const std::vector<std::string>& schema,
    const BoostParams& params, int replicates, const RngStream& stream);

// Empirical quantile (linear interpolation between order statistics).
double quantile(std::vector<double> values, double prob);

}  // namespace lmboost
