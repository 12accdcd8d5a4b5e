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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace lmboost {

// A covariate value; std::nullopt is the Missing sentinel. Missing compares
// equal to Missing and unequal to every number.
using Covariate = std::optional<double>;
using CovariateVector = std::vector<Covariate>;

// Right-continuous piecewise-constant covariate path W(u). Jump times are
// strictly increasing and start at 0.
class CovariatePath {
 public:
  CovariatePath() = default;
  CovariatePath(std::vector<double> jump_times,
                std::vector<CovariateVector> values);

  std::size_t dimension() const { return dimension_; }
  std::size_t num_segments() const { return jump_times_.size(); }
  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<CovariateVector>& values() const { return values_; }

  // Index of the segment containing u, i.e. of the largest jump time <= u.
  std::size_t segment_at(double u) const;

  // Appends a jump; `time` must exceed the last jump time.
  void append(double time, CovariateVector value);

  // The path restricted to [0, u]: segments starting after u are dropped.
  CovariatePath truncated(double u) const;

  friend bool operator==(const CovariatePath&, const CovariatePath&) = default;

 private:
  std::vector<double> jump_times_;
  std::vector<CovariateVector> values_;
  std::size_t dimension_ = 0;
};

// W(u): the value vector at the largest jump time <= u.
const CovariateVector& value_at(const CovariatePath& path, double u);

// tau(u): the largest jump time in (0, u], or 0 when the path has not
// changed by time u.
double last_change_time(const CovariatePath& path, double u);

// One subject's observed history on [0, horizon].
class SubjectRecord {
 public:
  SubjectRecord() = default;
  // Events after min(censor_time, horizon) are unobservable and dropped.
  SubjectRecord(std::int64_t id, CovariatePath path,
                std::optional<double> event_time, double censor_time,
                double horizon);

  std::int64_t id() const { return id_; }
  const CovariatePath& path() const { return path_; }
  const std::optional<double>& event_time() const { return event_time_; }
  double censor_time() const { return censor_time_; }
  double horizon() const { return horizon_; }

  // X = min(event, censor, horizon).
  double exit_time() const;
  bool has_event() const { return event_time_.has_value(); }

  // N(u) and Y(u).
  int counting(double u) const;
  bool at_risk(double u) const { return u <= exit_time(); }

  friend bool operator==(const SubjectRecord&, const SubjectRecord&) = default;

 private:
  std::int64_t id_ = 0;
  CovariatePath path_;
  std::optional<double> event_time_;
  double censor_time_ = 0.0;
  double horizon_ = 0.0;
};

// Per-dimension split points over (t, s, w_1..w_p). A dimension with no
// split points is "raw": its grid is the numerical precision of the data,
// so it is a single bin for cell lookup and tree thresholds come from the
// observed values.
class Partition {
 public:
  static constexpr std::size_t kTimeDim = 0;
  static constexpr std::size_t kLandmarkDim = 1;
  static constexpr std::size_t kFirstCovariateDim = 2;
  static constexpr std::size_t kMissingBin =
      std::numeric_limits<std::size_t>::max();

  Partition() = default;
  explicit Partition(std::vector<std::vector<double>> splits);

  // Uniform grid on [lo, hi] with the given step; the last split point is
  // the first grid point >= hi. Points are computed as k / (1 / step) when
  // 1 / step is integral so that e.g. 0.62 is the exact double literal.
  static std::vector<double> uniform_grid(double lo, double hi, double step);

  // Time grid on [0, horizon] with `t_step`, landmark grid with `s_step`
  // (0 = raw), raw covariates.
  static Partition for_horizon(double horizon, double t_step, double s_step,
                               std::size_t num_covariates);

  std::size_t dims() const { return splits_.size(); }
  std::size_t num_covariates() const { return dims() - kFirstCovariateDim; }
  const std::vector<double>& splits(std::size_t dim) const {
    return splits_[dim];
  }
  bool is_raw(std::size_t dim) const { return splits_[dim].empty(); }
  std::size_t num_bins(std::size_t dim) const;

  // Bin of a value under the [b_h, b_{h+1}) convention. Raw dimensions
  // return 0. Throws OutOfDomain naming `dim` when outside the grid.
  std::size_t bin_of(std::size_t dim, double value) const;

  // Lower edge of the bin containing `value` (the cell representative);
  // raw dimensions return the value unchanged.
  double representative(std::size_t dim, double value) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::vector<double>> splits_;
};

// Multi-index of the cell containing x = (t, s, w_1..w_p). Missing
// covariates yield Partition::kMissingBin; tree routing decides where they
// go.
std::vector<std::size_t> locate_bin(const Partition& partition,
                                    std::span<const Covariate> x);

struct LandmarkDraw {
  std::int64_t subject_id = 0;
  int q = 1;
  double s = 0.0;
};

// Bounds on the log-hazard; predictions are clamped to [lo, hi].
struct CapBounds {
  double log_lambda_lo = std::log(1e-4);
  double log_lambda_hi = std::log(1e3);

  void validate() const;
  double apply(double log_hazard) const {
    return std::fmax(std::fmin(log_hazard, log_lambda_hi), log_lambda_lo);
  }
};

}  // namespace lmboost
