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
#include <cstdint>
#include <stdexcept>
#include <set>
#include <vector>

#include "lmboost/parallel.hpp"
#include "lmboost/rng.hpp"

namespace lmboost {
namespace {

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswerZero) {
  auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c,
                                      0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  auto out = Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                               {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6,
                                      0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  auto out = Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                               {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420,
                                      0x24126ea1}));
}

TEST(Philox, SameSeedAndStreamRepeat) {
  Philox4x32 a(42, 7);
  Philox4x32 b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Philox, StreamsDiffer) {
  Philox4x32 a(42, 7);
  Philox4x32 b(42, 8);
  Philox4x32 c(43, 7);
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    auto x = a();
    same_ab += x == b();
    same_ac += x == c();
  }
  EXPECT_LT(same_ab, 3);
  EXPECT_LT(same_ac, 3);
}

TEST(RngStream, ChildrenAreDistinctAndStable) {
  RngStream root(5);
  std::set<std::uint64_t> ids;
  for (std::uint64_t k = 0; k < 1000; ++k) ids.insert(root.child(k).stream());
  EXPECT_EQ(ids.size(), 1000u);
  EXPECT_EQ(root.child(3).child(4).stream(), root.child(3).child(4).stream());
  EXPECT_NE(root.child(3).child(4).stream(), root.child(4).child(3).stream());
}

TEST(Uniform01, RangeAndMean) {
  Philox4x32 eng(1, 2);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = uniform01(eng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean of Unif(0,1) has sd 1/sqrt(12 n).
  EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (std::size_t threads : {1u, 4u}) {
    set_max_threads(threads);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
  set_max_threads(0);
}

TEST(ParallelFor, RethrowsFirstFailure) {
  set_max_threads(4);
  EXPECT_THROW(parallel_for(100,
                            [](std::size_t i) {
                              if (i == 17) throw std::runtime_error("x");
                            }),
               std::runtime_error);
  set_max_threads(0);
}

TEST(ParallelFor, NestedCallsRunInline) {
  set_max_threads(4);
  std::vector<int> hits(64, 0);
  parallel_for(8, [&](std::size_t i) {
    parallel_for(8, [&](std::size_t j) { hits[i * 8 + j] += 1; });
  });
  for (int h : hits) ASSERT_EQ(h, 1);
  set_max_threads(0);
}

}  // namespace
}  // namespace lmboost
