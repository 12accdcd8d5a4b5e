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
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lmboost/boost.hpp"
#include "lmboost/landmark.hpp"
#include "lmboost/rng.hpp"

namespace lmboost::internal {

inline constexpr std::uint32_t kMissingCode =
    std::numeric_limits<std::uint32_t>::max();

// Table features mapped to threshold indices: code c means the value lies
// between thresholds c-1 and c, so it goes left of threshold i iff c <= i.
class BinnedTable {
 public:
  BinnedTable(const OccExpTable& table,
              std::vector<std::vector<double>> thresholds);

  std::size_t size() const { return row_time_code_.size(); }
  std::size_t num_features() const { return thresholds_.size(); }
  const std::vector<std::vector<double>>& thresholds() const {
    return thresholds_;
  }

  std::uint32_t code(std::size_t row, std::size_t f) const {
    if (f == 0) return row_time_code_[row];
    return context_codes_[row_context_[row] * stride_ + f - 1];
  }

 private:
  std::vector<std::vector<double>> thresholds_;
  std::size_t stride_ = 0;
  std::vector<std::uint32_t> row_time_code_;
  std::vector<std::uint32_t> row_context_;
  std::vector<std::uint32_t> context_codes_;
};

// A fitted tree plus, per node, the index of its threshold in the binned
// table's threshold list.
struct BinnedTree {
  Tree tree;
  std::vector<std::uint32_t> threshold_index;

  std::size_t route(const BinnedTable& table, std::size_t row) const;
};

struct RowStats {
  double gradient = 0.0;
  double denominator = 0.0;  // hessian (Newton) or row weight (gradient)
  double hessian = 0.0;
};

BinnedTree fit_binned_tree(const BinnedTable& table,
                           std::span<const RowStats> stats,
                           const BoostParams& params, const RngStream& stream);

}  // namespace lmboost::internal
