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
#include <optional>
#include <vector>

#include "lmboost/core_types.hpp"
#include "lmboost/error.hpp"
#include "lmboost/rng.hpp"

namespace lmboost {
namespace {

CovariatePath scalar_path(std::vector<double> times, std::vector<double> v) {
  std::vector<CovariateVector> values;
  for (double x : v) values.push_back({x});
  return CovariatePath(std::move(times), std::move(values));
}

TEST(CovariatePath, ValueAtIsRightContinuous) {
  auto path = scalar_path({0.0, 0.5}, {1.0, 2.0});
  EXPECT_EQ(*value_at(path, 0.49)[0], 1.0);
  EXPECT_EQ(*value_at(path, 0.5)[0], 2.0);
  EXPECT_EQ(*value_at(scalar_path({0.0}, {1.0}), 0.99)[0], 1.0);
}

TEST(CovariatePath, RejectsMalformedInput) {
  EXPECT_THROW(scalar_path({0.1}, {1.0}), InvalidArgument);
  EXPECT_THROW(scalar_path({0.0, 0.5, 0.5}, {1, 2, 3}), InvalidArgument);
  EXPECT_THROW(CovariatePath({0.0, 1.0}, {{1.0}, {1.0, 2.0}}),
               InvalidArgument);
  EXPECT_THROW(CovariatePath({0.0}, {}), InvalidArgument);
}

TEST(CovariatePath, TruncatedKeepsSegmentsUpToU) {
  auto path = scalar_path({0.0, 0.3, 0.7}, {1, 2, 3});
  EXPECT_EQ(path.truncated(0.5).jump_times(), (std::vector<double>{0.0, 0.3}));
  EXPECT_EQ(path.truncated(0.7).num_segments(), 3u);
  EXPECT_EQ(path.truncated(0.0).num_segments(), 1u);
}

TEST(LastChangeTime, Examples) {
  EXPECT_EQ(last_change_time(scalar_path({0.0, 0.3, 0.7}, {1, 2, 3}), 0.5),
            0.3);
  EXPECT_EQ(last_change_time(scalar_path({0.0}, {1}), 0.9), 0.0);
  EXPECT_EQ(last_change_time(scalar_path({0.0, 0.3}, {1, 2}), 0.3), 0.3);
}

TEST(CovariatePath, PropertyConstantBetweenJumps) {
  Philox4x32 eng(11, 0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> times = {0.0};
    std::vector<double> vals = {uniform01(eng)};
    while (times.back() < 1.0) {
      times.push_back(times.back() + 0.01 + uniform01(eng) * 0.3);
      vals.push_back(uniform01(eng));
    }
    auto path = scalar_path(times, vals);
    for (int k = 0; k < 50; ++k) {
      const double u = uniform01(eng) * 1.2;
      const std::size_t seg = path.segment_at(u);
      ASSERT_LE(times[seg], u);
      if (seg + 1 < times.size()) ASSERT_LT(u, times[seg + 1]);
      ASSERT_EQ(*value_at(path, u)[0], vals[seg]);
      const double tau = last_change_time(path, u);
      ASSERT_LE(tau, u);
      ASSERT_EQ(tau == 0.0, seg == 0);
    }
  }
}

TEST(SubjectRecord, ExitAndCountingProcess) {
  auto path = scalar_path({0.0}, {1.0});
  SubjectRecord a(1, path, 0.4, 0.9, 1.0);
  EXPECT_DOUBLE_EQ(a.exit_time(), 0.4);
  EXPECT_EQ(a.counting(0.39), 0);
  EXPECT_EQ(a.counting(0.4), 1);
  EXPECT_TRUE(a.at_risk(0.4));
  EXPECT_FALSE(a.at_risk(0.41));

  SubjectRecord late(2, path, 0.95, 0.9, 1.0);
  EXPECT_FALSE(late.has_event());
  EXPECT_DOUBLE_EQ(late.exit_time(), 0.9);

  SubjectRecord admin(3, path, std::nullopt, 5.0, 1.0);
  EXPECT_DOUBLE_EQ(admin.exit_time(), 1.0);
  EXPECT_THROW(SubjectRecord(4, path, std::nullopt, 1.0, 0.0), InvalidArgument);
}

TEST(Partition, LocateBinExamples) {
  Partition part({{0.0, 0.5, 1.0}, {}});
  CovariateVector x = {0.5, 0.2};
  EXPECT_EQ(locate_bin(part, x)[0], 1u);
  x[0] = 0.0;
  EXPECT_EQ(locate_bin(part, x)[0], 0u);
  x[0] = 1.0;
  try {
    locate_bin(part, x);
    FAIL() << "expected OutOfDomain";
  } catch (const OutOfDomain& e) {
    EXPECT_EQ(e.dimension(), 0u);
  }
}

TEST(Partition, MissingCovariateYieldsSentinel) {
  Partition part({{0.0, 1.0}, {}, {0.0, 1.0, 2.0}});
  CovariateVector x = {0.5, 0.1, std::nullopt};
  EXPECT_EQ(locate_bin(part, x)[2], Partition::kMissingBin);
  x[0] = std::nullopt;
  EXPECT_THROW(locate_bin(part, x), InvalidArgument);
}

TEST(Partition, RejectsUnsortedOrDegenerateSplits) {
  EXPECT_THROW(Partition({{0.0, 0.5, 0.5}, {}}), InvalidArgument);
  EXPECT_THROW(Partition({{}, {}}), InvalidArgument);
  EXPECT_THROW(Partition({{0.0}, {}}), InvalidArgument);
  EXPECT_THROW(Partition({{0.0, 1.0}}), InvalidArgument);
}

TEST(Partition, UniformGridHitsDecimalLiterals) {
  auto grid = Partition::uniform_grid(0.0, 1.0, 0.01);
  ASSERT_EQ(grid.size(), 101u);
  EXPECT_EQ(grid[62], 0.62);
  EXPECT_EQ(grid[7], 0.07);
  EXPECT_EQ(grid.back(), 1.0);
  auto monthly = Partition::uniform_grid(0.0, 14.31, 1.0 / 12.0);
  EXPECT_GE(monthly.back(), 14.31);
  EXPECT_LT(monthly[monthly.size() - 2], 14.31);
}

TEST(Partition, PropertyEveryPointInExactlyOneCell) {
  Partition part({Partition::uniform_grid(0.0, 1.0, 0.01),
                  Partition::uniform_grid(0.0, 1.0, 0.1),
                  {-3.0, -1.0, 0.0, 0.25, 4.0}});
  Philox4x32 eng(3, 1);
  for (int rep = 0; rep < 5000; ++rep) {
    CovariateVector x = {uniform01(eng), uniform01(eng),
                         -3.0 + 7.0 * uniform01(eng)};
    auto idx = locate_bin(part, x);
    for (std::size_t d = 0; d < 3; ++d) {
      const auto& sp = part.splits(d);
      ASSERT_LE(sp[idx[d]], *x[d]);
      ASSERT_LT(*x[d], sp[idx[d] + 1]);
      ASSERT_EQ(part.representative(d, *x[d]), sp[idx[d]]);
    }
  }
}

TEST(Partition, RawDimensionsPassValuesThrough) {
  Partition part = Partition::for_horizon(1.0, 0.01, 0.0, 2);
  EXPECT_EQ(part.dims(), 4u);
  EXPECT_TRUE(part.is_raw(1));
  EXPECT_TRUE(part.is_raw(3));
  EXPECT_EQ(part.num_bins(2), 1u);
  EXPECT_EQ(part.representative(2, 123.456), 123.456);
  EXPECT_EQ(part.bin_of(2, -1e9), 0u);
}

TEST(CapBounds, DefaultsAndClamp) {
  CapBounds cap;
  EXPECT_DOUBLE_EQ(cap.log_lambda_lo, std::log(1e-4));
  EXPECT_DOUBLE_EQ(cap.log_lambda_hi, std::log(1e3));
  EXPECT_EQ(cap.apply(100.0), cap.log_lambda_hi);
  EXPECT_EQ(cap.apply(-100.0), cap.log_lambda_lo);
  EXPECT_EQ(cap.apply(0.25), 0.25);
  CapBounds bad{1.0, 0.0};
  EXPECT_THROW(bad.validate(), InvalidArgument);
  CapBounds inf{-INFINITY, 0.0};
  EXPECT_THROW(inf.validate(), InvalidArgument);
}

}  // namespace
}  // namespace lmboost
