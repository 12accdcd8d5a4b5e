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

#include "lmboost/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "lmboost/csv.hpp"
#include "lmboost/error.hpp"
#include "lmboost/parallel.hpp"

namespace lmboost {
namespace {

CovariateVector row_features(const OccExpTable& table, std::size_t i) {
  CovariateVector x(table.num_features());
  for (std::size_t f = 0; f < x.size(); ++f) x[f] = table.feature(i, f);
  return x;
}

void check_feature(const OccExpTable& table, std::size_t feature) {
  if (feature >= table.num_features()) {
    throw InvalidArgument("feature index " + std::to_string(feature) +
                          " out of range");
  }
}

void write_comments(std::ostream& out, const std::vector<std::string>& c) {
  for (const auto& line : c) out << "# " << line << '\n';
}

}  // namespace

std::vector<double> gain_importance(const BoostModel& model) {
  std::vector<double> total(model.num_features(), 0.0);
  for (const auto& t : model.trees) {
    for (const TreeNode& node : t.tree.nodes()) {
      if (!node.is_leaf) total[node.feature] += node.gain;
    }
  }
  const double top = *std::max_element(total.begin(), total.end());
  if (!(top > 0.0)) {
    spdlog::warn("model has no splits; importance is zero everywhere");
    std::fill(total.begin(), total.end(), 0.0);
    return total;
  }
  for (double& v : total) v /= top;
  return total;
}

PartialDependence partial_dependence(const BoostModel& model,
                                     const OccExpTable& table,
                                     std::size_t feature,
                                     std::span<const double> grid,
                                     bool log_scale) {
  if (table.empty()) throw InvalidArgument("partial dependence needs rows");
  check_feature(table, feature);
  PartialDependence pdp;
  pdp.feature = feature;
  pdp.log_scale = log_scale;
  pdp.grid.assign(grid.begin(), grid.end());
  pdp.mean.assign(grid.size(), 0.0);

  double total_weight = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    total_weight += table.weight(i);
    if (Covariate v = table.feature(i, feature)) pdp.rug.push_back(*v);
  }
  std::sort(pdp.rug.begin(), pdp.rug.end());

  parallel_for(grid.size(), [&](std::size_t g) {
    double sum = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
      CovariateVector x = row_features(table, i);
      x[feature] = grid[g];
      const double f = model.predict(x);
      sum += table.weight(i) * (log_scale ? f : std::exp(f));
    }
    pdp.mean[g] = sum / total_weight;
  });
  return pdp;
}

std::vector<double> feature_grid(const OccExpTable& table, std::size_t feature,
                                 std::size_t points) {
  check_feature(table, feature);
  if (points == 0) throw InvalidArgument("grid needs at least one point");
  bool any = false;
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    Covariate v = table.feature(i, feature);
    if (!v) continue;
    lo = any ? std::min(lo, *v) : *v;
    hi = any ? std::max(hi, *v) : *v;
    any = true;
  }
  if (!any) throw InvalidArgument("feature has no observed values");
  std::vector<double> grid(points, lo);
  for (std::size_t k = 1; k < points; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) /
                       static_cast<double>(points - 1);
  }
  return grid;
}

std::vector<MarginalBin> marginal_plot(const BoostModel& model,
                                       const OccExpTable& table,
                                       std::size_t feature,
                                       std::size_t n_bins, bool log_scale) {
  check_feature(table, feature);
  if (n_bins == 0) throw InvalidArgument("marginal plot needs n_bins >= 1");
  const std::vector<double> range = feature_grid(table, feature, 2);
  const double lo = range.front();
  const double hi = range.back();
  const double width = (hi - lo) / static_cast<double>(n_bins);

  std::vector<MarginalBin> bins(n_bins);
  std::vector<double> sums(n_bins, 0.0);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].lo = lo + width * static_cast<double>(b);
    bins[b].hi = b + 1 == n_bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    Covariate v = table.feature(i, feature);
    if (!v) continue;
    std::size_t b = width > 0.0
                        ? static_cast<std::size_t>((*v - lo) / width)
                        : 0;
    b = std::min(b, n_bins - 1);
    const double f = model.predict(row_features(table, i));
    sums[b] += table.weight(i) * (log_scale ? f : std::exp(f));
    bins[b].count += table.weight(i);
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (bins[b].count > 0.0) bins[b].mean = sums[b] / bins[b].count;
  }
  return bins;
}

std::string feature_name(const std::vector<std::string>& schema,
                         std::size_t feature) {
  if (feature == Partition::kTimeDim) return "t";
  if (feature == Partition::kLandmarkDim) return "s";
  if (feature - 2 >= schema.size()) {
    throw InvalidArgument("feature index " + std::to_string(feature) +
                          " out of range");
  }
  return schema[feature - 2];
}

std::size_t feature_index(const std::vector<std::string>& schema,
                          const std::string& name) {
  if (name == "t") return Partition::kTimeDim;
  if (name == "s") return Partition::kLandmarkDim;
  auto it = std::find(schema.begin(), schema.end(), name);
  if (it == schema.end()) {
    throw InvalidArgument("unknown feature '" + name + "'");
  }
  return static_cast<std::size_t>(it - schema.begin()) + 2;
}

void write_importance_csv(std::ostream& out, const BoostModel& model,
                          std::span<const double> importance,
                          const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "feature,importance\n";
  for (std::size_t f = 0; f < importance.size(); ++f) {
    out << csv::quote(feature_name(model.schema, f)) << ','
        << csv::format_double(importance[f]) << '\n';
  }
}

void write_pdp_csv(std::ostream& out, const std::string& name,
                   const PartialDependence& pdp,
                   const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "feature,grid_value," << (pdp.log_scale ? "mean_log_hazard" : "mean_hazard")
      << '\n';
  for (std::size_t g = 0; g < pdp.grid.size(); ++g) {
    out << csv::quote(name) << ',' << csv::format_double(pdp.grid[g]) << ','
        << csv::format_double(pdp.mean[g]) << '\n';
  }
}

void write_rug_csv(std::ostream& out, const std::string& name,
                   std::span<const double> rug,
                   const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "feature,value\n";
  for (double v : rug) {
    out << csv::quote(name) << ',' << csv::format_double(v) << '\n';
  }
}

void write_marginal_csv(std::ostream& out, const std::string& name,
                        std::span<const MarginalBin> bins,
                        const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "feature,bin_lo,bin_hi,count,mean_hazard\n";
  for (const MarginalBin& b : bins) {
    out << csv::quote(name) << ',' << csv::format_double(b.lo) << ','
        << csv::format_double(b.hi) << ',' << csv::format_double(b.count)
        << ',' << (b.mean ? csv::format_double(*b.mean) : std::string("NA"))
        << '\n';
  }
}

}  // namespace lmboost
