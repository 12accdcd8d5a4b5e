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

#include "lmboost/predict.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lmboost/error.hpp"

namespace lmboost {

CovariateVector model_input(const BoostModel& model, double t, double s,
                            std::span<const Covariate> w) {
  if (w.size() != model.schema.size()) {
    throw InvalidArgument("expected " + std::to_string(model.schema.size()) +
                          " covariates, got " + std::to_string(w.size()));
  }
  if (t < s) throw InvalidArgument("prediction time t precedes landmark s");
  const Partition& partition = model.partition;
  CovariateVector x(model.num_features());
  const double s_rep = partition.representative(Partition::kLandmarkDim, s);
  // The window is closed at the horizon: t equal to the last split point
  // belongs to the last time bin.
  const auto& edges = partition.splits(Partition::kTimeDim);
  const double t_rep = t == edges.back()
                           ? edges[edges.size() - 2]
                           : partition.representative(Partition::kTimeDim, t);
  x[0] = std::max(t_rep, s_rep);
  x[1] = s_rep;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j]) {
      x[j + 2] = partition.representative(j + Partition::kFirstCovariateDim,
                                          *w[j]);
    }
  }
  return x;
}

double predict_log_hazard(const BoostModel& model, double t, double s,
                          std::span<const Covariate> w) {
  return model.predict(model_input(model, t, s, w));
}

double cumulative_hazard(const BoostModel& model, double s,
                         std::span<const Covariate> w, double horizon) {
  if (horizon < s) throw InvalidArgument("horizon precedes landmark s");
  if (horizon == s) return 0.0;
  const auto& edges = model.partition.splits(Partition::kTimeDim);
  if (s < edges.front() || horizon > edges.back()) {
    throw OutOfDomain(Partition::kTimeDim, s < edges.front() ? s : horizon);
  }
  double total = 0.0;
  std::size_t h = model.partition.bin_of(Partition::kTimeDim, s);
  for (; h + 1 < edges.size() && edges[h] < horizon; ++h) {
    const double lo = std::max(edges[h], s);
    const double hi = std::min(edges[h + 1], horizon);
    if (!(hi > lo)) continue;
    total += (hi - lo) * std::exp(predict_log_hazard(model, lo, s, w));
  }
  return total;
}

double predict_survival(const BoostModel& model, double s,
                        std::span<const Covariate> w, double horizon) {
  return std::exp(-cumulative_hazard(model, s, w, horizon));
}

SurvivalCurve predict_survival_curve(const BoostModel& model, double s,
                                     std::span<const Covariate> w,
                                     std::span<const double> grid) {
  SurvivalCurve curve;
  curve.s = s;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < s || (i > 0 && grid[i] < grid[i - 1])) {
      throw InvalidArgument("survival grid must be ascending and >= s");
    }
    curve.values.push_back(predict_survival(model, s, w, grid[i]));
  }
  return curve;
}

std::vector<BoostModel> bootstrap_models(
    std::span<const SubjectRecord> subjects, const LandmarkScheme& scheme,
    const Partition& partition, const std::vector<std::string>& schema,
    const BoostParams& params, int replicates, const RngStream& stream) {
  if (replicates < 1) throw InvalidArgument("bootstrap needs B >= 1");
  if (subjects.empty()) throw InvalidArgument("bootstrap needs subjects");
  std::vector<BoostModel> models;
  models.reserve(static_cast<std::size_t>(replicates));
  const RngStream boot = stream.child(stream_tag::kBootstrap);
  for (int b = 0; b < replicates; ++b) {
    const RngStream rep = boot.child(static_cast<std::uint64_t>(b));
    auto engine = rep.engine();
    std::uniform_int_distribution<std::size_t> pick(0, subjects.size() - 1);
    std::vector<SubjectRecord> sample;
    sample.reserve(subjects.size());
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      const SubjectRecord& src = subjects[pick(engine)];
      sample.emplace_back(static_cast<std::int64_t>(i) + 1, src.path(),
                          src.event_time(), src.censor_time(), src.horizon());
    }
    auto draws = draw_all_landmarks(scheme, sample, rep);
    OccExpTable table =
        collapse(build_super_dataset(sample, draws, partition, schema));
    models.push_back(boost_fit(table, params, rep));
  }
  return models;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw InvalidArgument("quantile of no values");
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw InvalidArgument("quantile probability outside [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace lmboost
