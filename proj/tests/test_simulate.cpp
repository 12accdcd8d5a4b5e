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

#include <cmath>
#include <numbers>
#include <vector>

#include "lmboost/core_types.hpp"
#include "lmboost/error.hpp"
#include "lmboost/parallel.hpp"
#include "lmboost/rng.hpp"
#include "lmboost/simulate.hpp"

namespace lmboost {
namespace {

CovariatePath path_of(std::vector<double> times,
                      std::vector<std::vector<double>> rows) {
  std::vector<CovariateVector> values;
  for (const auto& r : rows) {
    CovariateVector v;
    for (double x : r) v.push_back(x);
    values.push_back(std::move(v));
  }
  return CovariatePath(std::move(times), std::move(values));
}

// Independent survival oracle for the two-state chain: RK4 on the backward
// equation for u(h) = P(no event by s + h | W(s) = w).
std::array<double, 2> markov_survival_rk4(double a, double b, double f,
                                          double h) {
  auto rhs = [&](const std::array<double, 2>& u) {
    return std::array<double, 2>{-a * u[0] + f * (u[1] - u[0]),
                                 -(a + b) * u[1] + f * (u[0] - u[1])};
  };
  std::array<double, 2> u{1.0, 1.0};
  const int steps = 20000;
  const double dt = h / steps;
  for (int i = 0; i < steps; ++i) {
    auto k1 = rhs(u);
    auto k2 = rhs({u[0] + 0.5 * dt * k1[0], u[1] + 0.5 * dt * k1[1]});
    auto k3 = rhs({u[0] + 0.5 * dt * k2[0], u[1] + 0.5 * dt * k2[1]});
    auto k4 = rhs({u[0] + dt * k3[0], u[1] + dt * k3[1]});
    for (int j = 0; j < 2; ++j) {
      u[j] += dt / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
  }
  return u;
}

double binomial_se(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

TEST(ScenarioHazard, LinearExamples) {
  const auto sc = Scenario::linear();
  EXPECT_NEAR(scenario_hazard(sc, 0.0, path_of({0.0}, {{0, 0, 0}})), 0.3,
              1e-12);
  EXPECT_NEAR(scenario_hazard(sc, 1.0, path_of({0.0}, {{1, 1, 1}})),
              0.3 * std::exp(0.9), 1e-12);
  EXPECT_NEAR(0.3 * std::exp(0.9), 0.737881, 1e-6);
}

TEST(ScenarioHazard, NonlinearUsesPreviousW3) {
  const auto sc = Scenario::nonlinear_non_markov();
  const double pi = std::numbers::pi;
  // Single segment: W3 before the last change is 0.
  const double h0 = std::exp(std::log(0.3) + 0.3 * std::abs(std::sin(pi * 0.5)) +
                             0.2 * std::cos(1.0) + 0.5);
  EXPECT_NEAR(scenario_hazard(sc, 0.5, path_of({0.0}, {{1, 1, 0.4}})), h0,
              1e-12);
  // W2 = 0 makes the sine term vanish; W3 was 2 before the jump at 0.3.
  const auto path = path_of({0.0, 0.3}, {{0, 1, 2.0}, {0, 0, 0.2}});
  const double h1 = std::exp(std::log(0.3) + 0.2 + 0.3 * 4.0);
  EXPECT_NEAR(scenario_hazard(sc, 0.6, path), h1, 1e-12);
}

TEST(ScenarioHazard, EnvelopeDominatesHazard) {
  RngStream root(11);
  for (auto sc : {Scenario::linear(), Scenario::nonlinear_non_markov(),
                  Scenario::high_dim(root)}) {
    const auto cohort = simulate_cohort(sc, 200, root.child(1));
    for (const auto& subj : cohort) {
      const auto& jumps = subj.path().jump_times();
      for (std::size_t k = 0; k < jumps.size(); ++k) {
        const double to = k + 1 < jumps.size() ? jumps[k + 1] : sc.horizon;
        const double bound = segment_envelope(sc, subj.path(), jumps[k], to).bound;
        for (int i = 0; i <= 10; ++i) {
          const double t = jumps[k] + (to - jumps[k]) * i / 10.0;
          const double at = t < to ? t : std::nextafter(to, jumps[k]);
          ASSERT_LE(scenario_hazard(sc, at, subj.path()), bound * (1 + 1e-12));
        }
      }
    }
  }
}

TEST(Scenario, ValidateRejectsBadSettings) {
  auto sc = Scenario::linear();
  sc.horizon = 0.0;
  EXPECT_THROW(sc.validate(), InvalidArgument);
  sc = Scenario::linear();
  sc.p = 4;
  EXPECT_THROW(sc.validate(), InvalidArgument);
  EXPECT_THROW(Scenario::constant_hazard(-1.0).validate(), InvalidArgument);
  EXPECT_NO_THROW(Scenario::high_dim(RngStream(1)).validate());
}

TEST(SimulateCohort, ConstantHazardEventFraction) {
  auto sc = Scenario::constant_hazard(0.5);
  sc.lambda_c = 0.0;
  const std::size_t n = 40000;
  const auto cohort = simulate_cohort(sc, n, RngStream(3));
  std::size_t events = 0;
  for (const auto& s : cohort) events += s.has_event();
  const double p = 1.0 - std::exp(-0.5);
  EXPECT_NEAR(static_cast<double>(events) / n, p, 4 * binomial_se(p, n));
}

TEST(SimulateCohort, CensoringAndUpdateRates) {
  const auto sc = Scenario::linear();
  const std::size_t n = 40000;
  const auto cohort = simulate_cohort(sc, n, RngStream(5));
  std::size_t censored_early = 0;
  double jumps = 0.0;
  for (const auto& s : cohort) {
    censored_early += s.censor_time() < sc.horizon;
    jumps += static_cast<double>(s.path().jump_times().size() - 1);
    EXPECT_EQ(s.path().jump_times().front(), 0.0);
  }
  const double p = 1.0 - std::exp(-0.2);
  EXPECT_NEAR(static_cast<double>(censored_early) / n, p,
              4 * binomial_se(p, n));
  EXPECT_NEAR(jumps / n, 2.0, 4 * std::sqrt(2.0 / n));
}

TEST(SimulateCohort, MarkovSurvivalMatchesOracle) {
  auto sc = Scenario::two_state_markov(0.2, 0.6, 2.0);
  sc.lambda_c = 0.0;
  const std::size_t n = 40000;
  const auto cohort = simulate_cohort(sc, n, RngStream(9));
  for (double w : {0.0, 1.0}) {
    std::size_t at_start = 0, alive = 0;
    for (const auto& s : cohort) {
      if (*s.path().values()[0][0] != w) continue;
      ++at_start;
      alive += !s.has_event();
    }
    const double p = markov_survival_rk4(0.2, 0.6, 2.0, 1.0)[w == 0.0 ? 0 : 1];
    EXPECT_NEAR(static_cast<double>(alive) / at_start, p,
                4 * binomial_se(p, at_start));
  }
}

TEST(SimulateCohort, NoiseCovarianceMatchesFactor) {
  const RngStream root(21);
  const auto sc = Scenario::high_dim(root);
  const std::size_t n = 20000;
  const auto cohort = simulate_cohort(sc, n, root);
  const std::size_t q = Scenario::kNoiseCovariates;
  std::vector<double> sigma(q * q, 0.0);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < q; ++k)
        sigma[i * q + j] += sc.sigma_factor[i * q + k] * sc.sigma_factor[j * q + k];
  // Checks a few entries of the initial-noise covariance, which has zero mean.
  for (auto [i, j] : {std::pair{0, 0}, std::pair{3, 7}, std::pair{46, 12}}) {
    double acc = 0.0;
    for (const auto& s : cohort) {
      const auto& w = s.path().values()[0];
      acc += *w[3 + i] * *w[3 + j];
    }
    const double est = acc / n;
    const double sii = sigma[i * q + i], sjj = sigma[j * q + j];
    const double sij = sigma[i * q + j];
    const double se = std::sqrt((sii * sjj + sij * sij) / n);
    EXPECT_NEAR(est, sij, 5 * se) << i << "," << j;
  }
}

TEST(SimulateCohort, IndependentOfThreadCount) {
  const auto sc = Scenario::nonlinear_non_markov();
  set_max_threads(1);
  const auto one = simulate_cohort(sc, 500, RngStream(77));
  set_max_threads(8);
  const auto eight = simulate_cohort(sc, 500, RngStream(77));
  set_max_threads(0);
  EXPECT_EQ(one, eight);
  EXPECT_NE(one, simulate_cohort(sc, 500, RngStream(78)));
}

TEST(SimulateCohort, IdsAreOneBasedAndExitsInRange) {
  const auto cohort = simulate_cohort(Scenario::linear(), 100, RngStream(1));
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    EXPECT_EQ(cohort[i].id(), static_cast<std::int64_t>(i) + 1);
    EXPECT_GT(cohort[i].exit_time(), 0.0);
    EXPECT_LE(cohort[i].exit_time(), 1.0);
  }
}

TEST(Oracle, ConstantHazardAndEdgeCases) {
  const auto sc = Scenario::constant_hazard(0.7);
  const auto path = path_of({0.0}, {{1.0}});
  const std::size_t n = 20000;
  const double est = oracle_survival(sc, 0.2, path, 1.0, n, RngStream(4));
  const double p = std::exp(-0.7 * 0.8);
  EXPECT_NEAR(est, p, 4 * binomial_se(p, n));
  EXPECT_NEAR(analytic_survival(sc, 0.2, 1.0, 1.0), p, 1e-15);
  EXPECT_EQ(oracle_survival(sc, 0.4, path, 0.4, 10, RngStream(4)), 1.0);
  EXPECT_THROW(oracle_survival(sc, 0.2, path, 1.0, 0, RngStream(4)),
               InvalidArgument);
  EXPECT_THROW(oracle_survival(sc, 0.5, path, 0.4, 10, RngStream(4)),
               InvalidArgument);
  EXPECT_THROW(oracle_survival(sc, 0.5, path, 1.5, 10, RngStream(4)),
               InvalidArgument);
}

TEST(Oracle, MarkovAnalyticMatchesRk4) {
  const auto sc = Scenario::two_state_markov(0.2, 0.6, 2.0);
  for (double h : {0.0, 0.1, 0.5, 1.0}) {
    const auto u = markov_survival_rk4(0.2, 0.6, 2.0, h);
    EXPECT_NEAR(analytic_survival(sc, 0.0, 0.0, h), u[0], 1e-10);
    EXPECT_NEAR(analytic_survival(sc, 0.0, 1.0, h), u[1], 1e-10);
  }
  // No flips reduces to two constant hazards.
  const auto frozen = Scenario::two_state_markov(0.2, 0.6, 0.0);
  EXPECT_NEAR(analytic_survival(frozen, 0.3, 1.0, 0.8), std::exp(-0.8 * 0.5),
              1e-14);
}

TEST(Oracle, MarkovMonteCarloMatchesAnalytic) {
  const auto sc = Scenario::two_state_markov(0.2, 0.6, 2.0);
  const std::size_t n = 40000;
  for (double w : {0.0, 1.0}) {
    const auto path = path_of({0.0}, {{w}});
    const double est = oracle_survival(sc, 0.25, path, 1.0, n, RngStream(8));
    const double p = analytic_survival(sc, 0.25, w, 1.0);
    EXPECT_NEAR(est, p, 4 * binomial_se(p, n));
  }
}

TEST(Oracle, FutureHazardIsLogDerivativeOfSurvival) {
  const auto sc = Scenario::two_state_markov(0.2, 0.6, 2.0);
  const double s = 0.1, eps = 1e-5;
  for (double w : {0.0, 1.0}) {
    for (double t : {0.1, 0.4, 0.9}) {
      const double lo = std::log(analytic_survival(sc, s, w, t));
      const double hi = std::log(analytic_survival(sc, s, w, t + eps));
      EXPECT_NEAR(true_future_hazard(sc, t, s, w), -(hi - lo) / eps, 1e-5);
    }
  }
  // At t = s the future hazard is the current hazard.
  EXPECT_NEAR(true_future_hazard(sc, 0.3, 0.3, 1.0), 0.8, 1e-14);
  EXPECT_THROW(true_future_hazard(sc, 0.2, 0.3, 1.0), InvalidArgument);
  EXPECT_THROW(analytic_survival(Scenario::linear(), 0.0, 0.0, 1.0),
               InvalidArgument);
}

TEST(Oracle, IndependentOfThreadCount) {
  const auto sc = Scenario::nonlinear_non_markov();
  const auto path = path_of({0.0, 0.2}, {{1, 0, 0.3}, {1, 1, 0.9}});
  set_max_threads(1);
  const double one = oracle_survival(sc, 0.3, path, 1.0, 5000, RngStream(2));
  set_max_threads(8);
  const double eight = oracle_survival(sc, 0.3, path, 1.0, 5000, RngStream(2));
  set_max_threads(0);
  EXPECT_EQ(one, eight);
}

}  // namespace
}  // namespace lmboost
