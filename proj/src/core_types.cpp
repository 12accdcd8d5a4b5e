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

#include "lmboost/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lmboost/error.hpp"

namespace lmboost {

OutOfDomain::OutOfDomain(std::size_t dimension, double value)
    : DataError([&] {
        std::ostringstream msg;
        msg << "value " << value << " outside the partition of dimension "
            << dimension;
        return msg.str();
      }()),
      dimension_(dimension) {}

CovariatePath::CovariatePath(std::vector<double> jump_times,
                             std::vector<CovariateVector> values)
    : jump_times_(std::move(jump_times)), values_(std::move(values)) {
  if (jump_times_.empty() || jump_times_.front() != 0.0) {
    throw InvalidArgument("covariate path must start with a jump at time 0");
  }
  if (jump_times_.size() != values_.size()) {
    throw InvalidArgument("covariate path needs one value vector per jump");
  }
  dimension_ = values_.front().size();
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k].size() != dimension_) {
      throw InvalidArgument("covariate value vectors differ in length");
    }
    if (k > 0 && !(jump_times_[k] > jump_times_[k - 1])) {
      throw InvalidArgument("covariate jump times must strictly increase");
    }
  }
}

std::size_t CovariatePath::segment_at(double u) const {
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), u);
  return it == jump_times_.begin()
             ? 0
             : static_cast<std::size_t>(it - jump_times_.begin()) - 1;
}

void CovariatePath::append(double time, CovariateVector value) {
  if (jump_times_.empty()) {
    if (time != 0.0) throw InvalidArgument("first jump must be at time 0");
    dimension_ = value.size();
  } else if (!(time > jump_times_.back())) {
    throw InvalidArgument("covariate jump times must strictly increase");
  } else if (value.size() != dimension_) {
    throw InvalidArgument("covariate value vectors differ in length");
  }
  jump_times_.push_back(time);
  values_.push_back(std::move(value));
}

CovariatePath CovariatePath::truncated(double u) const {
  const std::size_t keep = segment_at(u) + 1;
  return CovariatePath(
      std::vector<double>(jump_times_.begin(), jump_times_.begin() + keep),
      std::vector<CovariateVector>(values_.begin(), values_.begin() + keep));
}

const CovariateVector& value_at(const CovariatePath& path, double u) {
  return path.values()[path.segment_at(u)];
}

double last_change_time(const CovariatePath& path, double u) {
  if (u <= 0.0) return 0.0;
  return path.jump_times()[path.segment_at(u)];
}

SubjectRecord::SubjectRecord(std::int64_t id, CovariatePath path,
                             std::optional<double> event_time,
                             double censor_time, double horizon)
    : id_(id),
      path_(std::move(path)),
      event_time_(event_time),
      censor_time_(censor_time),
      horizon_(horizon) {
  if (!(horizon_ > 0.0) || !(censor_time_ >= 0.0)) {
    throw InvalidArgument("subject " + std::to_string(id_) +
                          ": horizon must be positive and censor time >= 0");
  }
  if (event_time_ && (*event_time_ > censor_time_ || *event_time_ > horizon_)) {
    event_time_.reset();
  }
  if (event_time_ && *event_time_ < 0.0) {
    throw InvalidArgument("subject " + std::to_string(id_) +
                          ": negative event time");
  }
}

double SubjectRecord::exit_time() const {
  const double x = std::min(censor_time_, horizon_);
  return event_time_ ? std::min(*event_time_, x) : x;
}

int SubjectRecord::counting(double u) const {
  return event_time_ && *event_time_ <= u ? 1 : 0;
}

Partition::Partition(std::vector<std::vector<double>> splits)
    : splits_(std::move(splits)) {
  if (splits_.size() < kFirstCovariateDim) {
    throw InvalidArgument("partition needs at least the t and s dimensions");
  }
  if (splits_[kTimeDim].empty()) {
    throw InvalidArgument("the time dimension of a partition must be a grid");
  }
  for (std::size_t d = 0; d < splits_.size(); ++d) {
    const auto& sp = splits_[d];
    if (sp.size() == 1) {
      throw InvalidArgument("partition dimension " + std::to_string(d) +
                            " needs at least two split points");
    }
    for (std::size_t h = 1; h < sp.size(); ++h) {
      if (!(sp[h] > sp[h - 1])) {
        throw InvalidArgument("partition dimension " + std::to_string(d) +
                              ": split points must strictly increase");
      }
    }
  }
}

std::vector<double> Partition::uniform_grid(double lo, double hi,
                                            double step) {
  if (!(step > 0.0) || !(hi > lo)) {
    throw InvalidArgument("grid needs step > 0 and hi > lo");
  }
  const double inverse = 1.0 / step;
  const bool integral_inverse =
      std::abs(inverse - std::round(inverse)) < 1e-9 * inverse;
  auto point = [&](long k) {
    return integral_inverse ? lo + static_cast<double>(k) / std::round(inverse)
                            : lo + static_cast<double>(k) * step;
  };
  std::vector<double> grid;
  for (long k = 0;; ++k) {
    grid.push_back(point(k));
    if (grid.back() >= hi) break;
  }
  return grid;
}

Partition Partition::for_horizon(double horizon, double t_step, double s_step,
                                 std::size_t num_covariates) {
  std::vector<std::vector<double>> splits(kFirstCovariateDim + num_covariates);
  splits[kTimeDim] = uniform_grid(0.0, horizon, t_step);
  if (s_step > 0.0) {
    // s can equal the horizon only for landmarks that contribute nothing,
    // but keep it inside the grid anyway.
    splits[kLandmarkDim] = uniform_grid(0.0, horizon, s_step);
    if (splits[kLandmarkDim].back() <= horizon) {
      splits[kLandmarkDim].push_back(splits[kLandmarkDim].back() + s_step);
    }
  }
  return Partition(std::move(splits));
}

std::size_t Partition::num_bins(std::size_t dim) const {
  return is_raw(dim) ? 1 : splits_[dim].size() - 1;
}

std::size_t Partition::bin_of(std::size_t dim, double value) const {
  if (is_raw(dim)) return 0;
  const auto& sp = splits_[dim];
  if (!(value >= sp.front()) || !(value < sp.back())) {
    throw OutOfDomain(dim, value);
  }
  return static_cast<std::size_t>(
             std::upper_bound(sp.begin(), sp.end(), value) - sp.begin()) -
         1;
}

double Partition::representative(std::size_t dim, double value) const {
  if (is_raw(dim)) return value;
  return splits_[dim][bin_of(dim, value)];
}

std::vector<std::size_t> locate_bin(const Partition& partition,
                                    std::span<const Covariate> x) {
  if (x.size() != partition.dims()) {
    throw InvalidArgument("point dimension does not match the partition");
  }
  std::vector<std::size_t> index(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!x[d]) {
      if (d < Partition::kFirstCovariateDim) {
        throw InvalidArgument("t and s cannot be missing");
      }
      index[d] = Partition::kMissingBin;
    } else {
      index[d] = partition.bin_of(d, *x[d]);
    }
  }
  return index;
}

void CapBounds::validate() const {
  if (!std::isfinite(log_lambda_lo) || !std::isfinite(log_lambda_hi) ||
      !(log_lambda_lo < log_lambda_hi)) {
    throw InvalidArgument("cap bounds must be finite with lo < hi");
  }
}

}  // namespace lmboost
