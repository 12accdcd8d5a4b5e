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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lmboost/core_types.hpp"
#include "lmboost/landmark.hpp"
#include "lmboost/rng.hpp"

namespace lmboost {

enum class BoostMode {
  // Least-squares trees on the negative gradient with a fixed step.
  kGradientFixedStep,
  // Second-order trees (gain G^2/H, leaf -G/H) as in common GBDT libraries.
  kNewton,
};

std::string to_string(BoostMode mode);
BoostMode parse_boost_mode(const std::string& text);

// A split routes x[feature] < threshold left and >= threshold right;
// Missing goes left iff default_left.
struct TreeNode {
  bool is_leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  bool default_left = true;
  std::size_t left = 0;
  std::size_t right = 0;
  double value = 0.0;  // leaf output (log-hazard increment)
  double gain = 0.0;   // loss reduction of the split

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Binary tree stored in preorder; nodes()[0] is the root.
class Tree {
 public:
  Tree() : nodes_(1) {}
  explicit Tree(std::vector<TreeNode> nodes);

  static Tree leaf(double value);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t num_leaves() const;

  // Index of the leaf reached by x.
  std::size_t route(std::span<const Covariate> x) const;
  double predict(std::span<const Covariate> x) const {
    return nodes_[route(x)].value;
  }

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct BoostParams {
  double eta = 0.3;
  int max_depth = 6;
  int nrounds = 100;
  double min_child_weight = 1.0;
  double subsample = 1.0;
  double colsample_bytree = 1.0;
  double alpha = 0.0;  // L1 penalty on Newton leaf values
  BoostMode mode = BoostMode::kNewton;
  CapBounds cap;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BoostedTree {
  Tree tree;
  double eta = 1.0;

  friend bool operator==(const BoostedTree&, const BoostedTree&) = default;
};

// F-hat = cap(base_score + sum eta_j tree_j(x)).
struct BoostModel {
  double base_score = 0.0;
  std::vector<BoostedTree> trees;
  CapBounds cap;
  Partition partition;
  std::vector<std::string> schema;
  BoostMode mode = BoostMode::kNewton;

  std::size_t num_features() const { return schema.size() + 2; }

  // Uncapped score using the first `num_trees` trees (all by default).
  double raw_score(std::span<const Covariate> x,
                   std::size_t num_trees = static_cast<std::size_t>(-1)) const;
  double predict(std::span<const Covariate> x) const {
    return cap.apply(raw_score(x));
  }

  friend bool operator==(const BoostModel& a, const BoostModel& b);
};

struct GradHess {
  double gradient = 0.0;
  double hessian = 0.0;
};

// psi(F) = exp(F) * exposure - F * occ.
double poisson_loss(double log_hazard, double occ, double exposure);
// (exp(F) * exposure - occ, exp(F) * exposure).
GradHess poisson_grad_hess(double log_hazard, double occ, double exposure);

// Total Poisson loss of the capped model over the table.
double total_poisson_loss(const BoostModel& model, const OccExpTable& table);

// Candidate thresholds per feature: interior split points of grid
// dimensions, midpoints between sorted distinct observed values of raw ones.
std::vector<std::vector<double>> candidate_thresholds(const OccExpTable& table);

// Fits one tree to per-row gradient/hessian sums. In gradient mode the
// targets are -gradient / weight with the row weights as least-squares
// weights; in Newton mode leaves are -soft_threshold(G, alpha) / H. Row
// and feature subsampling consume `stream`.
Tree fit_tree(std::span<const GradHess> grad_hess, const OccExpTable& table,
              const BoostParams& params, const RngStream& stream);

// Called after each boosting round with the round index and its tree.
using RoundCallback = std::function<void(std::size_t, const Tree&)>;

// Boosts from base_score = log(sum occ / sum exp) for params.nrounds
// rounds; round j uses the substream (kRounds, j) of `stream`.
BoostModel boost_fit(const OccExpTable& table, const BoostParams& params,
                     const RngStream& stream,
                     const RoundCallback& on_round = {});

struct CvResult {
  int selected_nrounds = 0;
  // Mean held-out Poisson loss per row weight, for 0..max_rounds trees.
  std::vector<double> deviance;
  std::size_t folds_used = 0;
};

// Subject-level K-fold CV for the number of trees. Rows whose subject is
// mixed are left out. With `collapse_folds` each fold's training and
// held-out rows are collapsed before fitting.
CvResult cross_validate_nrounds(const OccExpTable& table,
                                const BoostParams& params, int folds,
                                int max_rounds, const RngStream& stream,
                                bool collapse_folds = true);

// Line-oriented text format; doubles are written in shortest round-trip
// form so reading returns an identical model.
void write_model(std::ostream& out, const BoostModel& model,
                 const std::vector<std::string>& comments = {});
BoostModel read_model(std::istream& in);

}  // namespace lmboost
