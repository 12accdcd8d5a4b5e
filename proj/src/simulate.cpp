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

#include "lmboost/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "lmboost/error.hpp"
#include "lmboost/parallel.hpp"

namespace lmboost {
namespace {

constexpr std::size_t kW1 = 0;
constexpr std::size_t kW2 = 1;
constexpr std::size_t kW3 = 2;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kOracleBlock = 1024;

const double kLogBaseRate = std::log(0.3);

// Standard deviations of the W3 initial value N(0.5, 0.5) and of its
// increments N(0.5, 0.25); the second parameter is a variance.
const double kW3InitialSd = std::sqrt(0.5);
const double kW3IncrementSd = std::sqrt(0.25);

double hazard_at(const Scenario& sc, double t, const CovariateVector& w,
                 double w3_before_change) {
  switch (sc.kind) {
    case ScenarioKind::kLinear:
    case ScenarioKind::kHighDim:
      return std::exp(kLogBaseRate + 0.2 * t + 0.1 * *w[kW1] +
                      0.3 * *w[kW2] + 0.3 * *w[kW3]);
    case ScenarioKind::kNonlinearNonMarkov: {
      const double w1 = *w[kW1];
      const double w3 = *w[kW3];
      const double indicator = (w1 == 1.0 && w3 < 0.5) ? 0.5 : 0.0;
      return std::exp(kLogBaseRate +
                      0.3 * std::abs(std::sin(std::numbers::pi * t * *w[kW2])) +
                      0.2 * std::cos(w1) + indicator +
                      0.3 * w3_before_change * w3_before_change);
    }
    case ScenarioKind::kConstantHazard:
      return sc.constant_rate;
    case ScenarioKind::kTwoStateMarkov:
      return sc.markov_a + sc.markov_b * *w[0];
  }
  return 0.0;
}

// Supremum of hazard_at over t in [from, to] for fixed covariates.
double envelope_at(const Scenario& sc, double from, double to,
                   const CovariateVector& w, double w3_before_change) {
  switch (sc.kind) {
    case ScenarioKind::kLinear:
    case ScenarioKind::kHighDim:
      return hazard_at(sc, std::max(from, to), w, w3_before_change);
    case ScenarioKind::kNonlinearNonMarkov: {
      const double w1 = *w[kW1];
      const double w3 = *w[kW3];
      const double indicator = (w1 == 1.0 && w3 < 0.5) ? 0.5 : 0.0;
      const double sine_max = *w[kW2] == 0.0 ? 0.0 : 1.0;
      return std::exp(kLogBaseRate + 0.3 * sine_max + 0.2 * std::cos(w1) +
                      indicator + 0.3 * w3_before_change * w3_before_change);
    }
    case ScenarioKind::kConstantHazard:
      return sc.constant_rate;
    case ScenarioKind::kTwoStateMarkov:
      return sc.markov_a + std::max(sc.markov_b * *w[0], 0.0);
  }
  return 0.0;
}

double w3_before(const Scenario& sc, const CovariatePath& path,
                 std::size_t segment) {
  if (sc.kind != ScenarioKind::kNonlinearNonMarkov || segment == 0) return 0.0;
  return *path.values()[segment - 1][kW3];
}

template <typename Engine>
CovariateVector initial_covariates(const Scenario& sc, Engine& eng,
                                   std::normal_distribution<double>& normal) {
  std::bernoulli_distribution coin(0.5);
  CovariateVector w(sc.p);
  switch (sc.kind) {
    case ScenarioKind::kLinear:
    case ScenarioKind::kNonlinearNonMarkov:
    case ScenarioKind::kHighDim: {
      w[kW1] = coin(eng) ? 1.0 : 0.0;
      w[kW2] = coin(eng) ? 1.0 : 0.0;
      w[kW3] = 0.5 + kW3InitialSd * normal(eng);
      if (sc.kind == ScenarioKind::kHighDim && sc.p > 3) {
        std::vector<double> z(Scenario::kNoiseCovariates);
        for (double& zi : z) zi = normal(eng);
        for (std::size_t i = 0; i < Scenario::kNoiseCovariates; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < Scenario::kNoiseCovariates; ++j) {
            acc += sc.sigma_factor[i * Scenario::kNoiseCovariates + j] * z[j];
          }
          w[3 + i] = acc;
        }
      }
      break;
    }
    case ScenarioKind::kConstantHazard:
    case ScenarioKind::kTwoStateMarkov:
      w[0] = coin(eng) ? 1.0 : 0.0;
      break;
  }
  return w;
}

template <typename Engine>
void update_covariates(const Scenario& sc, CovariateVector& w, Engine& eng,
                       std::normal_distribution<double>& normal) {
  switch (sc.kind) {
    case ScenarioKind::kLinear:
    case ScenarioKind::kNonlinearNonMarkov:
    case ScenarioKind::kHighDim: {
      std::bernoulli_distribution coin(0.5);
      w[kW2] = coin(eng) ? 1.0 : 0.0;
      w[kW3] = *w[kW3] + 0.5 + kW3IncrementSd * normal(eng);
      if (sc.kind == ScenarioKind::kHighDim && sc.p > 3) {
        std::vector<double> z(Scenario::kNoiseCovariates);
        for (double& zi : z) zi = normal(eng);
        for (std::size_t i = 0; i < Scenario::kNoiseCovariates; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < Scenario::kNoiseCovariates; ++j) {
            acc += sc.sigma_factor[i * Scenario::kNoiseCovariates + j] * z[j];
          }
          w[3 + i] = *w[3 + i] + acc;
        }
      }
      break;
    }
    case ScenarioKind::kConstantHazard:
    case ScenarioKind::kTwoStateMarkov:
      w[0] = 1.0 - *w[0];
      break;
  }
}

// Thinning on (from, to] against a constant majorant. Returns the accepted
// time or +inf.
template <typename Engine>
double thin_segment(const Scenario& sc, double from, double to,
                    const CovariateVector& w, double w3b, Engine& eng) {
  const double bound = envelope_at(sc, from, to, w, w3b);
  if (!(bound > 0.0)) return kInf;
  std::exponential_distribution<double> gap(bound);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double t = from + gap(eng); t <= to; t += gap(eng)) {
    const double h = hazard_at(sc, t, w, w3b);
    if (h > bound * (1.0 + 1e-12)) {
      throw EnvelopeViolation("hazard " + std::to_string(h) +
                              " exceeds thinning bound " +
                              std::to_string(bound) + " at t=" +
                              std::to_string(t));
    }
    if (unif(eng) * bound <= h) return t;
  }
  return kInf;
}

// Scenario 3's noise block does not enter the hazard, so forward
// simulation for the oracle can run on the first three covariates.
Scenario hazard_relevant(const Scenario& sc) {
  if (sc.kind != ScenarioKind::kHighDim) return sc;
  Scenario reduced = sc;
  reduced.kind = ScenarioKind::kLinear;
  reduced.p = 3;
  reduced.sigma_factor.clear();
  return reduced;
}

// Symmetric 2x2 matrix exponential, returned row-major.
std::array<double, 4> expm_symmetric_2x2(double q00, double q01, double q11,
                                         double h) {
  const double mean = 0.5 * (q00 + q11);
  const double half_diff = 0.5 * (q00 - q11);
  const double radius = std::hypot(half_diff, q01);
  const double scale = std::exp(mean * h);
  const double ch = std::cosh(radius * h);
  // sinh(r h) / r, continuous at r = 0.
  const double sh = radius > 0.0 ? std::sinh(radius * h) / radius : h;
  return {scale * (ch + sh * half_diff), scale * sh * q01, scale * sh * q01,
          scale * (ch - sh * half_diff)};
}

std::array<double, 2> markov_row(const Scenario& sc, double w, double h) {
  const double f = sc.lambda_w;
  const auto e = expm_symmetric_2x2(-(f + sc.markov_a), f,
                                    -(f + sc.markov_a + sc.markov_b), h);
  return w == 0.0 ? std::array<double, 2>{e[0], e[1]}
                  : std::array<double, 2>{e[2], e[3]};
}

}  // namespace

Scenario Scenario::linear() { return Scenario{}; }

Scenario Scenario::nonlinear_non_markov() {
  Scenario sc;
  sc.kind = ScenarioKind::kNonlinearNonMarkov;
  return sc;
}

Scenario Scenario::high_dim(const RngStream& dataset_stream) {
  Scenario sc;
  sc.kind = ScenarioKind::kHighDim;
  sc.p = 3 + kNoiseCovariates;
  auto eng = dataset_stream.child(stream_tag::kNoiseFactor).engine();
  std::normal_distribution<double> normal;
  sc.sigma_factor.resize(kNoiseCovariates * kNoiseCovariates);
  for (double& a : sc.sigma_factor) a = normal(eng);
  return sc;
}

Scenario Scenario::constant_hazard(double c) {
  Scenario sc;
  sc.kind = ScenarioKind::kConstantHazard;
  sc.p = 1;
  sc.constant_rate = c;
  return sc;
}

Scenario Scenario::two_state_markov(double a, double b, double flip_rate) {
  Scenario sc;
  sc.kind = ScenarioKind::kTwoStateMarkov;
  sc.p = 1;
  sc.markov_a = a;
  sc.markov_b = b;
  sc.lambda_w = flip_rate;
  return sc;
}

void Scenario::validate() const {
  if (!(lambda_c >= 0.0) || !(lambda_w >= 0.0) || !(horizon > 0.0)) {
    throw InvalidArgument(
        "scenario needs lambda_c >= 0, lambda_w >= 0 and horizon > 0");
  }
  const bool high_dim = kind == ScenarioKind::kHighDim;
  if (high_dim != !sigma_factor.empty()) {
    throw InvalidArgument("sigma_factor must be present iff kind is HighDim");
  }
  switch (kind) {
    case ScenarioKind::kLinear:
    case ScenarioKind::kNonlinearNonMarkov:
      if (p != 3) throw InvalidArgument("scenarios 1 and 2 have p = 3");
      break;
    case ScenarioKind::kHighDim:
      if (p != 3 + kNoiseCovariates ||
          sigma_factor.size() != kNoiseCovariates * kNoiseCovariates) {
        throw InvalidArgument("scenario 3 needs p = 50 and a 47x47 factor");
      }
      break;
    case ScenarioKind::kConstantHazard:
      if (p != 1 || !(constant_rate >= 0.0)) {
        throw InvalidArgument("constant hazard needs p = 1 and c >= 0");
      }
      break;
    case ScenarioKind::kTwoStateMarkov:
      if (p != 1 || !(markov_a >= 0.0) || !(markov_a + markov_b >= 0.0)) {
        throw InvalidArgument(
            "two-state Markov needs p = 1 and non-negative hazards");
      }
      break;
  }
}

std::vector<std::string> Scenario::covariate_names() const {
  std::vector<std::string> names;
  for (std::size_t j = 1; j <= p; ++j) names.push_back("w_" + std::to_string(j));
  return names;
}

std::string Scenario::name() const {
  switch (kind) {
    case ScenarioKind::kLinear:
      return "1";
    case ScenarioKind::kNonlinearNonMarkov:
      return "2";
    case ScenarioKind::kHighDim:
      return "3";
    case ScenarioKind::kConstantHazard:
      return "constant";
    case ScenarioKind::kTwoStateMarkov:
      return "markov";
  }
  return "?";
}

bool Scenario::has_analytic_oracle() const {
  return kind == ScenarioKind::kConstantHazard ||
         kind == ScenarioKind::kTwoStateMarkov;
}

double scenario_hazard(const Scenario& scenario, double t,
                       const CovariatePath& path) {
  const std::size_t k = path.segment_at(t);
  return hazard_at(scenario, t, path.values()[k], w3_before(scenario, path, k));
}

HazardEnvelope segment_envelope(const Scenario& scenario,
                                const CovariatePath& path, double from,
                                double to) {
  const std::size_t k = path.segment_at(from);
  return {envelope_at(scenario, from, to, path.values()[k],
                      w3_before(scenario, path, k))};
}

SubjectRecord simulate_subject(const Scenario& scenario, std::int64_t id,
                               const RngStream& stream) {
  auto eng = stream.engine();
  std::normal_distribution<double> normal;

  CovariateVector w = initial_covariates(scenario, eng, normal);
  CovariatePath path;
  path.append(0.0, w);
  if (scenario.lambda_w > 0.0) {
    std::exponential_distribution<double> gap(scenario.lambda_w);
    for (double t = gap(eng); t <= scenario.horizon; t += gap(eng)) {
      update_covariates(scenario, w, eng, normal);
      path.append(t, w);
    }
  }

  double censor = scenario.horizon;
  if (scenario.lambda_c > 0.0) {
    censor = std::min(
        censor, std::exponential_distribution<double>(scenario.lambda_c)(eng));
  }

  std::optional<double> event;
  const auto& jumps = path.jump_times();
  for (std::size_t k = 0; k < jumps.size() && jumps[k] < censor; ++k) {
    const double end =
        k + 1 < jumps.size() ? std::min(jumps[k + 1], censor) : censor;
    const double t = thin_segment(scenario, jumps[k], end, path.values()[k],
                                  w3_before(scenario, path, k), eng);
    if (t <= end) {
      event = t;
      break;
    }
  }
  return SubjectRecord(id, std::move(path), event, censor, scenario.horizon);
}

std::vector<SubjectRecord> simulate_cohort(const Scenario& scenario,
                                           std::size_t n,
                                           const RngStream& stream) {
  scenario.validate();
  const RngStream subjects = stream.child(stream_tag::kSubjects);
  std::vector<SubjectRecord> cohort(n);
  parallel_for(n, [&](std::size_t i) {
    cohort[i] = simulate_subject(scenario, static_cast<std::int64_t>(i) + 1,
                                 subjects.child(i));
  });
  return cohort;
}

double oracle_survival(const Scenario& scenario, double s,
                       const CovariatePath& path, double horizon,
                       std::size_t n_sims, const RngStream& stream) {
  if (n_sims == 0) throw InvalidArgument("oracle needs n_sims > 0");
  if (!(s <= horizon) || horizon > scenario.horizon) {
    throw InvalidArgument("oracle needs s <= horizon <= T");
  }
  if (horizon == s) return 1.0;

  const Scenario sc = hazard_relevant(scenario);
  const std::size_t k = path.segment_at(s);
  CovariateVector start = path.values()[k];
  start.resize(sc.p);
  const double start_w3b = w3_before(sc, path, k);

  const std::size_t blocks = (n_sims + kOracleBlock - 1) / kOracleBlock;
  std::vector<std::size_t> survivors(blocks, 0);
  parallel_for(blocks, [&](std::size_t b) {
    auto eng = stream.child(b).engine();
    std::normal_distribution<double> normal;
    std::exponential_distribution<double> gap(sc.lambda_w > 0.0 ? sc.lambda_w
                                                                : 1.0);
    const std::size_t count = std::min(kOracleBlock, n_sims - b * kOracleBlock);
    CovariateVector w;
    for (std::size_t r = 0; r < count; ++r) {
      w = start;
      double w3b = start_w3b;
      double t = s;
      bool alive = true;
      while (true) {
        const double next = sc.lambda_w > 0.0 ? t + gap(eng) : kInf;
        const double end = std::min(next, horizon);
        if (thin_segment(sc, t, end, w, w3b, eng) <= end) {
          alive = false;
          break;
        }
        if (next >= horizon) break;
        if (sc.kind == ScenarioKind::kNonlinearNonMarkov) w3b = *w[kW3];
        update_covariates(sc, w, eng, normal);
        t = next;
      }
      if (alive) ++survivors[b];
    }
  });
  std::size_t total = 0;
  for (std::size_t c : survivors) total += c;
  return static_cast<double>(total) / static_cast<double>(n_sims);
}

double analytic_survival(const Scenario& scenario, double s, double w,
                         double horizon) {
  if (!(s <= horizon)) throw InvalidArgument("survival needs s <= horizon");
  const double h = horizon - s;
  switch (scenario.kind) {
    case ScenarioKind::kConstantHazard:
      return std::exp(-scenario.constant_rate * h);
    case ScenarioKind::kTwoStateMarkov: {
      const auto row = markov_row(scenario, w, h);
      return row[0] + row[1];
    }
    default:
      throw InvalidArgument("scenario " + scenario.name() +
                            " has no analytic survival");
  }
}

double true_future_hazard(const Scenario& scenario, double t, double s,
                          double w) {
  if (!(s <= t)) throw InvalidArgument("future hazard needs s <= t");
  switch (scenario.kind) {
    case ScenarioKind::kConstantHazard:
      return scenario.constant_rate;
    case ScenarioKind::kTwoStateMarkov: {
      // -d/dt log(e_w^T exp(Q h) 1) = v . (a, a + b) / v . 1.
      const auto v = markov_row(scenario, w, t - s);
      return (v[0] * scenario.markov_a +
              v[1] * (scenario.markov_a + scenario.markov_b)) /
             (v[0] + v[1]);
    }
    default:
      throw InvalidArgument("scenario " + scenario.name() +
                            " has no closed-form future hazard");
  }
}

}  // namespace lmboost
