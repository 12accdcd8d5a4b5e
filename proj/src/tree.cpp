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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "lmboost/boost.hpp"
#include "lmboost/error.hpp"
#include "lmboost/parallel.hpp"
#include "tree_internal.hpp"

namespace lmboost {

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InvalidArgument("tree has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& node = nodes_[i];
    if (node.is_leaf) continue;
    if (node.left <= i || node.right <= i || node.left >= nodes_.size() ||
        node.right >= nodes_.size()) {
      throw InvalidArgument("tree child index out of preorder range");
    }
  }
}

Tree Tree::leaf(double value) {
  TreeNode node;
  node.value = value;
  return Tree(std::vector<TreeNode>{node});
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t Tree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(),
                    [](const TreeNode& n) { return n.is_leaf; }));
}

std::size_t Tree::route(std::span<const Covariate> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf) {
    const TreeNode& node = nodes_[i];
    const Covariate& v = x[node.feature];
    bool go_left = v ? *v < node.threshold : node.default_left;
    i = go_left ? node.left : node.right;
  }
  return i;
}

std::vector<std::vector<double>> candidate_thresholds(
    const OccExpTable& table) {
  const Partition& partition = table.partition();
  std::vector<std::vector<double>> out(table.num_features());
  for (std::size_t f = 0; f < out.size(); ++f) {
    if (!partition.is_raw(f)) {
      const auto& splits = partition.splits(f);
      if (splits.size() > 2) {
        out[f].assign(splits.begin() + 1, splits.end() - 1);
      }
      continue;
    }
    // Raw dimensions are never the time axis, so values live on contexts.
    std::vector<double> values;
    values.reserve(table.num_contexts());
    for (std::size_t c = 0; c < table.num_contexts(); ++c) {
      if (f == Partition::kLandmarkDim) {
        values.push_back(table.context_s(c));
      } else {
        Covariate v = table.context_covariate(c, f - 2);
        if (v) values.push_back(*v);
      }
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      double lo = values[k];
      double hi = values[k + 1];
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid > lo)) mid = hi;
      out[f].push_back(mid);
    }
  }
  return out;
}

namespace internal {
namespace {

std::uint32_t encode(const std::vector<double>& thresholds, double v) {
  return static_cast<std::uint32_t>(
      std::upper_bound(thresholds.begin(), thresholds.end(), v) -
      thresholds.begin());
}

}  // namespace

BinnedTable::BinnedTable(const OccExpTable& table,
                         std::vector<std::vector<double>> thresholds)
    : thresholds_(std::move(thresholds)) {
  if (thresholds_.size() != table.num_features()) {
    throw InvalidArgument("threshold list does not match table features");
  }
  stride_ = thresholds_.size() - 1;
  const std::size_t p = table.num_covariates();
  context_codes_.resize(table.num_contexts() * stride_);
  for (std::size_t c = 0; c < table.num_contexts(); ++c) {
    std::uint32_t* codes = &context_codes_[c * stride_];
    codes[0] = encode(thresholds_[1], table.context_s(c));
    for (std::size_t j = 0; j < p; ++j) {
      Covariate v = table.context_covariate(c, j);
      codes[j + 1] = v ? encode(thresholds_[j + 2], *v) : kMissingCode;
    }
  }
  row_time_code_.resize(table.size());
  row_context_.resize(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    row_time_code_[i] = encode(thresholds_[0], *table.feature(i, 0));
    row_context_[i] = static_cast<std::uint32_t>(table.context_of(i));
  }
}

std::size_t BinnedTree::route(const BinnedTable& table,
                              std::size_t row) const {
  const auto& nodes = tree.nodes();
  std::size_t i = 0;
  while (!nodes[i].is_leaf) {
    const TreeNode& node = nodes[i];
    std::uint32_t c = table.code(row, node.feature);
    bool go_left =
        c == kMissingCode ? node.default_left : c <= threshold_index[i];
    i = go_left ? node.left : node.right;
  }
  return i;
}

namespace {

struct Sums {
  double g = 0.0;
  double d = 0.0;
  double h = 0.0;

  void add(const RowStats& s) {
    g += s.gradient;
    d += s.denominator;
    h += s.hessian;
  }
  void add(const Sums& s) {
    g += s.g;
    d += s.d;
    h += s.h;
  }
};

struct SplitChoice {
  bool found = false;
  double gain = 0.0;
  std::size_t feature = 0;
  std::uint32_t threshold = 0;
  bool default_left = true;
};

class TreeBuilder {
 public:
  TreeBuilder(const BinnedTable& table, std::span<const RowStats> stats,
              const BoostParams& params, std::vector<std::size_t> features)
      : table_(table),
        stats_(stats),
        params_(params),
        newton_(params.mode == BoostMode::kNewton),
        features_(std::move(features)) {}

  BinnedTree build(std::vector<std::uint32_t> rows) {
    grow(std::move(rows), 0);
    BinnedTree out;
    out.tree = Tree(std::move(nodes_));
    out.threshold_index = std::move(threshold_index_);
    return out;
  }

 private:
  double shrink(double g) const {
    if (!newton_ || params_.alpha == 0.0) return g;
    if (g > params_.alpha) return g - params_.alpha;
    if (g < -params_.alpha) return g + params_.alpha;
    return 0.0;
  }

  double score(const Sums& s) const {
    double g = shrink(s.g);
    return g * g / s.d;
  }

  double leaf_value(const Sums& s) const {
    if (!(s.d > 0.0)) return 0.0;
    return -shrink(s.g) / s.d;
  }

  bool admissible(const Sums& s) const {
    return s.d > 0.0 && s.h >= params_.min_child_weight;
  }

  SplitChoice search_feature(std::size_t f,
                             const std::vector<std::uint32_t>& rows,
                             const Sums& parent) const {
    SplitChoice best;
    const std::size_t nt = table_.thresholds()[f].size();
    if (nt == 0) return best;
    std::vector<Sums> hist(nt + 1);
    Sums missing;
    bool any_missing = false;
    for (std::uint32_t r : rows) {
      std::uint32_t c = table_.code(r, f);
      if (c == kMissingCode) {
        missing.add(stats_[r]);
        any_missing = true;
      } else {
        hist[c].add(stats_[r]);
      }
    }
    std::vector<Sums> suffix(nt + 2);
    for (std::size_t c = nt + 1; c-- > 0;) {
      suffix[c] = suffix[c + 1];
      suffix[c].add(hist[c]);
    }
    const double parent_score = score(parent);
    const double factor = newton_ ? 0.5 : 1.0;
    Sums left;
    for (std::size_t i = 0; i < nt; ++i) {
      left.add(hist[i]);
      const Sums& right = suffix[i + 1];
      for (int dl = 1; dl >= (any_missing ? 0 : 1); --dl) {
        Sums l = left;
        Sums r = right;
        if (dl) {
          l.add(missing);
        } else {
          r.add(missing);
        }
        if (!admissible(l) || !admissible(r)) continue;
        double sl = score(l);
        double sr = score(r);
        double gain = factor * (sl + sr - parent_score);
        double scale = factor * (sl + sr + parent_score);
        if (!(gain > 1e-12 * scale) || !(gain > 0.0)) continue;
        if (!best.found || gain > best.gain) {
          best.found = true;
          best.gain = gain;
          best.feature = f;
          best.threshold = static_cast<std::uint32_t>(i);
          best.default_left = dl == 1;
        }
      }
    }
    return best;
  }

  std::size_t grow(std::vector<std::uint32_t> rows, int depth) {
    Sums total;
    for (std::uint32_t r : rows) total.add(stats_[r]);

    const std::size_t index = nodes_.size();
    nodes_.emplace_back();
    threshold_index_.push_back(0);

    SplitChoice best;
    if (depth < params_.max_depth && admissible(total)) {
      std::vector<SplitChoice> per_feature(features_.size());
      parallel_for(features_.size(), [&](std::size_t k) {
        per_feature[k] = search_feature(features_[k], rows, total);
      });
      for (const SplitChoice& c : per_feature) {
        if (c.found && (!best.found || c.gain > best.gain)) best = c;
      }
    }
    if (!best.found) {
      nodes_[index].value = leaf_value(total);
      return index;
    }

    std::vector<std::uint32_t> left_rows;
    std::vector<std::uint32_t> right_rows;
    for (std::uint32_t r : rows) {
      std::uint32_t c = table_.code(r, best.feature);
      bool go_left =
          c == kMissingCode ? best.default_left : c <= best.threshold;
      (go_left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    TreeNode split;
    split.is_leaf = false;
    split.feature = best.feature;
    split.threshold = table_.thresholds()[best.feature][best.threshold];
    split.default_left = best.default_left;
    split.gain = best.gain;
    threshold_index_[index] = best.threshold;
    split.left = grow(std::move(left_rows), depth + 1);
    split.right = grow(std::move(right_rows), depth + 1);
    nodes_[index] = split;
    return index;
  }

  const BinnedTable& table_;
  std::span<const RowStats> stats_;
  const BoostParams& params_;
  bool newton_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> threshold_index_;
};

}  // namespace

// Row subsampling draws one uniform per row in row order, then feature
// subsampling runs a partial Fisher-Yates shuffle on the same engine.
BinnedTree fit_binned_tree(const BinnedTable& table,
                           std::span<const RowStats> stats,
                           const BoostParams& params,
                           const RngStream& stream) {
  if (stats.size() != table.size()) {
    throw InvalidArgument("row statistics do not match the table");
  }
  auto engine = stream.engine();
  std::vector<std::uint32_t> rows;
  rows.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (params.subsample >= 1.0 || uniform01(engine) < params.subsample) {
      rows.push_back(static_cast<std::uint32_t>(i));
    }
  }

  const std::size_t nf = table.num_features();
  std::vector<std::size_t> features(nf);
  std::iota(features.begin(), features.end(), std::size_t{0});
  if (params.colsample_bytree < 1.0) {
    auto k = static_cast<std::size_t>(
        std::floor(params.colsample_bytree * static_cast<double>(nf)));
    k = std::clamp<std::size_t>(k, 1, nf);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, nf - 1);
      std::swap(features[i], features[pick(engine)]);
    }
    features.resize(k);
    std::sort(features.begin(), features.end());
  }

  TreeBuilder builder(table, stats, params, std::move(features));
  return builder.build(std::move(rows));
}

}  // namespace internal

Tree fit_tree(std::span<const GradHess> grad_hess, const OccExpTable& table,
              const BoostParams& params, const RngStream& stream) {
  params.validate();
  if (table.empty()) throw InvalidArgument("cannot fit a tree to no rows");
  if (grad_hess.size() != table.size()) {
    throw InvalidArgument("gradient count does not match table rows");
  }
  std::vector<internal::RowStats> stats(table.size());
  const bool newton = params.mode == BoostMode::kNewton;
  for (std::size_t i = 0; i < table.size(); ++i) {
    stats[i].gradient = grad_hess[i].gradient;
    stats[i].hessian = grad_hess[i].hessian;
    stats[i].denominator = newton ? grad_hess[i].hessian : table.weight(i);
  }
  internal::BinnedTable binned(table, candidate_thresholds(table));
  return internal::fit_binned_tree(binned, stats, params, stream).tree;
}

}  // namespace lmboost
