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

#include "lmboost/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/spdlog.h>

#include "lmboost/error.hpp"
#include "lmboost/parallel.hpp"
#include "lmboost/predict.hpp"

namespace lmboost {

std::vector<TestPoint> build_test_set(const Scenario& scenario,
                                      std::size_t n_target,
                                      std::size_t n_sims,
                                      const RngStream& stream) {
  if (n_target < 1) throw InvalidArgument("test set needs n_target >= 1");
  scenario.validate();
  const RngStream base = stream.child(stream_tag::kTestSet);
  std::vector<TestPoint> points;
  std::vector<RngStream> point_streams;
  points.reserve(n_target);
  for (std::uint64_t k = 0; points.size() < n_target; ++k) {
    const RngStream candidate = base.child(k);
    SubjectRecord subject = simulate_subject(
        scenario, static_cast<std::int64_t>(k) + 1, candidate);
    auto engine = candidate.child(stream_tag::kLandmarks).engine();
    const double s = uniform01(engine) * scenario.horizon;
    if (!(subject.exit_time() > s)) continue;
    TestPoint point;
    point.subject_id = subject.id();
    point.s = s;
    point.history = subject.path().truncated(s);
    point.w = value_at(point.history, s);
    points.push_back(std::move(point));
    point_streams.push_back(candidate.child(stream_tag::kOracle));
  }

  const bool analytic = scenario.has_analytic_oracle();
  parallel_for(points.size(), [&](std::size_t i) {
    TestPoint& point = points[i];
    point.oracle =
        analytic
            ? analytic_survival(scenario, point.s, *point.w[0],
                                scenario.horizon)
            : oracle_survival(scenario, point.s, point.history,
                              scenario.horizon, n_sims, point_streams[i]);
  });
  return points;
}

void predict_test_set(const BoostModel& model, double horizon,
                      std::span<TestPoint> points) {
  parallel_for(points.size(), [&](std::size_t i) {
    points[i].predicted =
        predict_survival(model, points[i].s, points[i].w, horizon);
  });
}

std::string to_string(Metric metric) {
  return metric == Metric::kRmse ? "rmse" : "mape";
}

Metric parse_metric(const std::string& text) {
  if (text == "rmse") return Metric::kRmse;
  if (text == "mape") return Metric::kMape;
  throw InvalidArgument("unknown metric '" + text + "' (expected rmse or mape)");
}

double score(std::span<const TestPoint> points, Metric metric) {
  if (points.empty()) throw InvalidArgument("cannot score an empty test set");
  double total = 0.0;
  for (const TestPoint& p : points) {
    const double err = p.predicted - p.oracle;
    if (metric == Metric::kRmse) {
      total += err * err;
    } else {
      if (!(p.oracle > 0.0)) {
        throw InvalidArgument("MAPE undefined: a true survival is zero");
      }
      total += std::fabs(err) / p.oracle;
    }
  }
  const double mean = total / static_cast<double>(points.size());
  return metric == Metric::kRmse ? std::sqrt(mean) : mean;
}

EmpiricalMeasure empirical_measure(const OccExpTable& table) {
  EmpiricalMeasure measure;
  measure.points.reserve(table.size());
  measure.weights.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CovariateVector x(table.num_features());
    for (std::size_t f = 0; f < x.size(); ++f) x[f] = table.feature(i, f);
    measure.points.push_back(std::move(x));
    measure.weights.push_back(table.exposure(i));
  }
  return measure;
}

namespace {

double total_weight(const EmpiricalMeasure& measure) {
  if (measure.points.empty()) {
    throw InvalidArgument("empirical measure is empty");
  }
  double total = 0.0;
  for (double w : measure.weights) total += w;
  if (!(total > 0.0)) throw InvalidArgument("empirical measure has no mass");
  return total;
}

}  // namespace

double l1_mu_error(const BoostModel& model, const LogHazardFn& truth,
                   const EmpiricalMeasure& measure) {
  const double mass = total_weight(measure);
  double total = 0.0;
  for (std::size_t i = 0; i < measure.points.size(); ++i) {
    const auto& x = measure.points[i];
    total += measure.weights[i] * std::fabs(model.predict(x) - truth(x));
  }
  return total / mass;
}

double mu_mass_within(const BoostModel& model, const LogHazardFn& truth,
                      const EmpiricalMeasure& measure, double rel_tol) {
  const double mass = total_weight(measure);
  double inside = 0.0;
  for (std::size_t i = 0; i < measure.points.size(); ++i) {
    const auto& x = measure.points[i];
    const double ratio = std::exp(model.predict(x) - truth(x));
    if (std::fabs(ratio - 1.0) <= rel_tol) inside += measure.weights[i];
  }
  return inside / mass;
}

LogHazardFn true_log_hazard(const Scenario& scenario) {
  if (!scenario.has_analytic_oracle()) {
    throw InvalidArgument("scenario " + scenario.name() +
                          " has no closed-form future hazard");
  }
  return [scenario](std::span<const Covariate> x) {
    const double w = x[2] ? *x[2] : 0.0;
    return std::log(true_future_hazard(scenario, *x[0], *x[1], w));
  };
}

Scenario make_scenario(const std::string& name, const RngStream& dataset,
                       double constant_rate, double markov_a, double markov_b,
                       double markov_flip) {
  if (name == "1") return Scenario::linear();
  if (name == "2") return Scenario::nonlinear_non_markov();
  if (name == "3") return Scenario::high_dim(dataset);
  if (name == "constant") return Scenario::constant_hazard(constant_rate);
  if (name == "markov") {
    return Scenario::two_state_markov(markov_a, markov_b, markov_flip);
  }
  throw InvalidArgument("unknown scenario '" + name +
                        "' (expected 1, 2, 3, constant or markov)");
}

BoostParams study_params(ScenarioKind kind) {
  BoostParams params;
  params.eta = 0.1;
  params.max_depth = 1;
  params.min_child_weight = 20.0;
  params.subsample = 0.9;
  params.colsample_bytree = 0.7;
  switch (kind) {
    case ScenarioKind::kNonlinearNonMarkov:
      params.max_depth = 3;
      break;
    case ScenarioKind::kHighDim:
      params.min_child_weight = 100.0;
      params.subsample = 0.7;
      params.colsample_bytree = 1.0;
      params.alpha = 100.0;
      break;
    case ScenarioKind::kConstantHazard:
    case ScenarioKind::kTwoStateMarkov:
      params.max_depth = 2;
      params.subsample = 1.0;
      params.colsample_bytree = 1.0;
      break;
    case ScenarioKind::kLinear:
      break;
  }
  return params;
}

StudyFit fit_study_model(const StudySettings& settings) {
  const RngStream root(settings.seed);
  StudyFit fit;
  fit.scenario = make_scenario(settings.scenario, root);
  const Scenario& scenario = fit.scenario;
  auto subjects = simulate_cohort(scenario, settings.n, root);

  LandmarkScheme scheme;
  scheme.kind = LandmarkKind::kUniformOnT;
  scheme.Q = settings.Q;
  scheme.horizon = scenario.horizon;
  const Partition partition =
      Partition::for_horizon(scenario.horizon, settings.t_step,
                             settings.s_step, scenario.p);
  auto draws = draw_all_landmarks(scheme, subjects, root);
  OccExpTable table = build_super_dataset(subjects, draws, partition,
                                          scenario.covariate_names());
  subjects.clear();
  subjects.shrink_to_fit();

  BoostParams params = settings.params;
  params.seed = settings.seed;
  if (settings.max_rounds > 0) {
    CvResult cv = cross_validate_nrounds(table, params, settings.cv_folds,
                                         settings.max_rounds, root, true);
    params.nrounds = cv.selected_nrounds;
    if (cv.selected_nrounds == settings.max_rounds) {
      spdlog::warn("scenario {} n={} Q={} seed={}: CV picked max_rounds={}",
                   settings.scenario, settings.n, settings.Q, settings.seed,
                   settings.max_rounds);
    }
  }
  table = collapse(table);
  fit.model = boost_fit(table, params, root);
  fit.nrounds = params.nrounds;
  return fit;
}

StudyResult run_study_cell(const StudySettings& settings) {
  const RngStream root(settings.seed);
  const Scenario scenario = make_scenario(settings.scenario, root);
  return run_study_cell(settings,
                        build_test_set(scenario, settings.test_size,
                                       settings.oracle_sims, root));
}

StudyResult run_study_cell(const StudySettings& settings,
                           std::vector<TestPoint> test_set) {
  StudyFit fit = fit_study_model(settings);
  predict_test_set(fit.model, fit.scenario.horizon, test_set);
  StudyResult result;
  result.rmse = score(test_set, Metric::kRmse);
  // MAPE is undefined when a Monte Carlo truth is zero; report NaN for the
  // cell instead of failing the whole study.
  const bool mape_defined = std::all_of(test_set.begin(), test_set.end(),
                                        [](const TestPoint& p) { return p.oracle > 0.0; });
  if (mape_defined) {
    result.mape = score(test_set, Metric::kMape);
  } else {
    spdlog::warn("MAPE undefined for scenario {} n={} Q={} seed={}: a true survival is zero",
                 settings.scenario, settings.n, settings.Q, settings.seed);
    result.mape = std::numeric_limits<double>::quiet_NaN();
  }
  result.nrounds = fit.nrounds;
  return result;
}

}  // namespace lmboost
