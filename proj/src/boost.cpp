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

#include "lmboost/boost.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/spdlog.h>

#include "lmboost/error.hpp"
#include "lmboost/parallel.hpp"
#include "tree_internal.hpp"

namespace lmboost {

std::string to_string(BoostMode mode) {
  return mode == BoostMode::kNewton ? "newton" : "gradient";
}

BoostMode parse_boost_mode(const std::string& text) {
  if (text == "newton") return BoostMode::kNewton;
  if (text == "gradient") return BoostMode::kGradientFixedStep;
  throw InvalidArgument("unknown boosting mode '" + text +
                        "' (expected newton or gradient)");
}

void BoostParams::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw InvalidArgument("eta must lie in (0, 1]");
  }
  if (max_depth < 0) throw InvalidArgument("max_depth must be >= 0");
  if (nrounds < 0) throw InvalidArgument("nrounds must be >= 0");
  if (!(min_child_weight >= 0.0)) {
    throw InvalidArgument("min_child_weight must be >= 0");
  }
  if (!(subsample > 0.0 && subsample <= 1.0)) {
    throw InvalidArgument("subsample must lie in (0, 1]");
  }
  if (!(colsample_bytree > 0.0 && colsample_bytree <= 1.0)) {
    throw InvalidArgument("colsample_bytree must lie in (0, 1]");
  }
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  cap.validate();
}

double BoostModel::raw_score(std::span<const Covariate> x,
                             std::size_t num_trees) const {
  if (x.size() != num_features()) {
    throw InvalidArgument("feature vector has " + std::to_string(x.size()) +
                          " entries, model expects " +
                          std::to_string(num_features()));
  }
  double f = base_score;
  const std::size_t n = std::min(num_trees, trees.size());
  for (std::size_t j = 0; j < n; ++j) {
    f += trees[j].eta * trees[j].tree.predict(x);
  }
  return f;
}

bool operator==(const BoostModel& a, const BoostModel& b) {
  return a.base_score == b.base_score && a.trees == b.trees &&
         a.cap.log_lambda_lo == b.cap.log_lambda_lo &&
         a.cap.log_lambda_hi == b.cap.log_lambda_hi &&
         a.partition == b.partition && a.schema == b.schema &&
         a.mode == b.mode;
}

double poisson_loss(double log_hazard, double occ, double exposure) {
  return std::exp(log_hazard) * exposure - log_hazard * occ;
}

GradHess poisson_grad_hess(double log_hazard, double occ, double exposure) {
  const double mu = std::exp(log_hazard) * exposure;
  return {mu - occ, mu};
}

double total_poisson_loss(const BoostModel& model, const OccExpTable& table) {
  CovariateVector x(table.num_features());
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t f = 0; f < x.size(); ++f) x[f] = table.feature(i, f);
    total += poisson_loss(model.predict(x), table.occ(i), table.exposure(i));
  }
  return total;
}

namespace {

using internal::BinnedTable;
using internal::BinnedTree;
using internal::RowStats;

using BinnedCallback = std::function<void(std::size_t, const BinnedTree&)>;

BoostModel fit_binned(const OccExpTable& table, const BinnedTable& binned,
                      const BoostParams& params, const RngStream& stream,
                      const BinnedCallback& on_round) {
  params.validate();
  const double occ = table.total_occ();
  if (table.empty() || !(occ > 0.0)) {
    throw DegenerateData("no occurrences: the base hazard is zero");
  }

  BoostModel model;
  model.base_score = std::log(occ / table.total_exposure());
  model.cap = params.cap;
  model.partition = table.partition();
  model.schema = table.schema();
  model.mode = params.mode;

  const bool newton = params.mode == BoostMode::kNewton;
  std::vector<double> score(table.size(), model.base_score);
  std::vector<RowStats> stats(table.size());
  const RngStream rounds = stream.child(stream_tag::kRounds);
  for (int m = 0; m < params.nrounds; ++m) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      GradHess gh =
          poisson_grad_hess(score[i], table.occ(i), table.exposure(i));
      stats[i].gradient = gh.gradient;
      stats[i].hessian = gh.hessian;
      stats[i].denominator = newton ? gh.hessian : table.weight(i);
    }
    BinnedTree fitted = internal::fit_binned_tree(
        binned, stats, params, rounds.child(static_cast<std::uint64_t>(m)));
    const auto& nodes = fitted.tree.nodes();
    for (std::size_t i = 0; i < table.size(); ++i) {
      score[i] += params.eta * nodes[fitted.route(binned, i)].value;
    }
    if (on_round) on_round(static_cast<std::size_t>(m), fitted);
    model.trees.push_back({std::move(fitted.tree), params.eta});
  }
  return model;
}

}  // namespace

BoostModel boost_fit(const OccExpTable& table, const BoostParams& params,
                     const RngStream& stream, const RoundCallback& on_round) {
  params.validate();
  if (table.empty()) throw DegenerateData("cannot fit an empty table");
  BinnedTable binned(table, candidate_thresholds(table));
  BinnedCallback forward;
  if (on_round) {
    forward = [&](std::size_t m, const BinnedTree& t) { on_round(m, t.tree); };
  }
  return fit_binned(table, binned, params, stream, forward);
}

CvResult cross_validate_nrounds(const OccExpTable& table,
                                const BoostParams& params, int folds,
                                int max_rounds, const RngStream& stream,
                                bool collapse_folds) {
  params.validate();
  if (folds < 2) throw InvalidArgument("cross-validation needs K >= 2");
  if (max_rounds < 0) throw InvalidArgument("max_rounds must be >= 0");

  std::vector<std::int64_t> subjects;
  for (std::size_t c = 0; c < table.num_contexts(); ++c) {
    if (table.context_subject(c) != kMixedSubject) {
      subjects.push_back(table.context_subject(c));
    }
  }
  std::sort(subjects.begin(), subjects.end());
  subjects.erase(std::unique(subjects.begin(), subjects.end()),
                 subjects.end());
  const RngStream fold_stream = stream.child(stream_tag::kFolds);
  auto engine = fold_stream.engine();
  std::shuffle(subjects.begin(), subjects.end(), engine);
  std::map<std::int64_t, int> fold_of;
  for (std::size_t k = 0; k < subjects.size(); ++k) {
    fold_of[subjects[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
  }

  std::vector<int> row_fold(table.size(), -1);
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto it = fold_of.find(table.subject(i));
    if (it == fold_of.end()) {
      ++excluded;
    } else {
      row_fold[i] = it->second;
    }
  }
  if (excluded > 0) {
    spdlog::warn("cross-validation: {} rows with mixed subjects left out",
                 excluded);
  }

  BoostParams fold_params = params;
  fold_params.nrounds = max_rounds;
  const auto num_rounds = static_cast<std::size_t>(max_rounds) + 1;
  std::vector<std::vector<double>> fold_loss(static_cast<std::size_t>(folds));

  parallel_for(static_cast<std::size_t>(folds), [&](std::size_t k) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> held_rows;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (row_fold[i] < 0) continue;
      (static_cast<std::size_t>(row_fold[i]) == k ? held_rows : train_rows)
          .push_back(i);
    }
    if (held_rows.empty()) {
      spdlog::warn("cross-validation: fold {} has no held-out rows; skipped",
                   k);
      return;
    }
    OccExpTable train = table.subset(train_rows);
    OccExpTable held = table.subset(held_rows);
    if (collapse_folds) {
      train = collapse(train);
      held = collapse(held);
    }
    if (train.empty() || !(train.total_occ() > 0.0)) {
      spdlog::warn(
          "cross-validation: fold {} has no training occurrences; skipped", k);
      return;
    }

    BinnedTable train_binned(train, candidate_thresholds(train));
    BinnedTable held_binned(held, train_binned.thresholds());
    const double base = std::log(train.total_occ() / train.total_exposure());
    std::vector<double> held_score(held.size(), base);
    double held_weight = 0.0;
    for (std::size_t i = 0; i < held.size(); ++i) held_weight += held.weight(i);

    std::vector<double> losses;
    losses.reserve(num_rounds);
    auto record = [&] {
      double total = 0.0;
      for (std::size_t i = 0; i < held.size(); ++i) {
        total += poisson_loss(params.cap.apply(held_score[i]), held.occ(i),
                              held.exposure(i));
      }
      losses.push_back(total / held_weight);
    };
    record();
    fit_binned(train, train_binned, fold_params,
               fold_stream.child(static_cast<std::uint64_t>(k) + 1),
               [&](std::size_t, const BinnedTree& tree) {
                 const auto& nodes = tree.tree.nodes();
                 for (std::size_t i = 0; i < held.size(); ++i) {
                   held_score[i] += fold_params.eta *
                                    nodes[tree.route(held_binned, i)].value;
                 }
                 record();
               });
    fold_loss[k] = std::move(losses);
  });

  CvResult result;
  result.deviance.assign(num_rounds, 0.0);
  for (const auto& losses : fold_loss) {
    if (losses.empty()) continue;
    ++result.folds_used;
    for (std::size_t r = 0; r < num_rounds; ++r) result.deviance[r] += losses[r];
  }
  if (result.folds_used == 0) {
    throw DegenerateData("cross-validation: every fold was skipped");
  }
  for (double& d : result.deviance) {
    d /= static_cast<double>(result.folds_used);
  }
  result.selected_nrounds = static_cast<int>(
      std::min_element(result.deviance.begin(), result.deviance.end()) -
      result.deviance.begin());
  return result;
}

}  // namespace lmboost
