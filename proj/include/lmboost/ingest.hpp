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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmboost/core_types.hpp"

namespace lmboost {

enum class ColumnKind { kNumeric, kCategorical };

struct CovariateColumn {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
};

// Column layout of a long-format file with one row per visit.
struct LongitudinalSchema {
  std::string id_column = "id";
  std::string visit_column = "visit";
  std::string exit_column = "exit";
  std::string status_column = "status";
  // Statuses that mark the event; any other status is censoring.
  std::vector<std::string> event_statuses = {"event"};
  // Optional column with the censoring time; when absent the censoring
  // time is the exit time.
  std::optional<std::string> censor_column;
  std::vector<CovariateColumn> covariates;
  std::string missing_token;
  double horizon = 1.0;

  void validate() const;
  std::vector<std::string> covariate_names() const;

  // The layout written by write_longitudinal_csv for p numeric covariates.
  static LongitudinalSchema simulated(const std::vector<std::string>& names,
                                      double horizon);
  // The pbc2 registry export: transplantation or death is the event and
  // T = 14.31 years.
  static LongitudinalSchema pbc2();
};

// Level -> integer code per categorical column, in first-seen order.
using CategoricalDictionary = std::map<std::string, std::vector<std::string>>;

void write_dictionary(std::ostream& out, const CategoricalDictionary& dict);
CategoricalDictionary read_dictionary(std::istream& in);

// Reads visits, groups them by subject (ascending id) and builds LOCF
// covariate paths. A subject whose first visit is after 0 gets an
// all-missing segment on [0, first visit). Categorical levels are coded
// through `dictionary`, which is extended with unseen levels.
std::vector<SubjectRecord> read_longitudinal_csv(
    std::istream& in, const LongitudinalSchema& schema,
    CategoricalDictionary& dictionary);
std::vector<SubjectRecord> read_longitudinal_csv(
    const std::string& path, const LongitudinalSchema& schema,
    CategoricalDictionary& dictionary);

// One row per path segment: id,visit,exit,status,censor,<covariates>.
void write_longitudinal_csv(std::ostream& out,
                            std::span<const SubjectRecord> subjects,
                            const std::vector<std::string>& names,
                            const std::vector<std::string>& comments = {});

// Kolmogorov-Smirnov distance between visit/exit ratios and Unif(0, 1).
double visit_uniformity_ks(std::span<const SubjectRecord> subjects);

}  // namespace lmboost
