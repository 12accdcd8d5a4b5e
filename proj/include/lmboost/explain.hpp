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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmboost/boost.hpp"
#include "lmboost/landmark.hpp"

namespace lmboost {

// Per-feature split gain totals divided by their maximum. A model with no
// splits yields all zeros.
std::vector<double> gain_importance(const BoostModel& model);

struct PartialDependence {
  std::size_t feature = 0;
  std::vector<double> grid;
  std::vector<double> mean;   // per grid value
  std::vector<double> rug;    // observed non-missing feature values
  bool log_scale = false;
};

// Mean over table rows of exp(F) (or F with log_scale) with the feature
// forced to each grid value. Rows are weighted by their multiplicity.
PartialDependence partial_dependence(const BoostModel& model,
                                     const OccExpTable& table,
                                     std::size_t feature,
                                     std::span<const double> grid,
                                     bool log_scale = false);

// Evenly spaced grid over the observed range of a feature.
std::vector<double> feature_grid(const OccExpTable& table, std::size_t feature,
                                 std::size_t points);

struct MarginalBin {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> mean;  // empty bin -> nullopt
  double count = 0.0;          // row weight in the bin
};

// Equal-width bins over the observed range of a feature, each with the
// mean prediction of rows falling in it.
std::vector<MarginalBin> marginal_plot(const BoostModel& model,
                                       const OccExpTable& table,
                                       std::size_t feature,
                                       std::size_t n_bins = 10,
                                       bool log_scale = false);

// Name of feature f: "t", "s" or the covariate name.
std::string feature_name(const std::vector<std::string>& schema,
                         std::size_t feature);
std::size_t feature_index(const std::vector<std::string>& schema,
                          const std::string& name);

void write_importance_csv(std::ostream& out, const BoostModel& model,
                          std::span<const double> importance,
                          const std::vector<std::string>& comments = {});
void write_pdp_csv(std::ostream& out, const std::string& name,
                   const PartialDependence& pdp,
                   const std::vector<std::string>& comments = {});
void write_rug_csv(std::ostream& out, const std::string& name,
                   std::span<const double> rug,
                   const std::vector<std::string>& comments = {});
void write_marginal_csv(std::ostream& out, const std::string& name,
                        std::span<const MarginalBin> bins,
                        const std::vector<std::string>& comments = {});

}  // namespace lmboost
