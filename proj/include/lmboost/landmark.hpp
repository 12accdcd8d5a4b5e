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
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmboost/core_types.hpp"
#include "lmboost/rng.hpp"

namespace lmboost {

enum class LandmarkKind { kUniformOnT, kVisitBased };

struct LandmarkScheme {
  LandmarkKind kind = LandmarkKind::kUniformOnT;
  int Q = 1;
  double horizon = 1.0;

  void validate() const;
};

// Subject id of a collapsed row that pools several subjects.
inline constexpr std::int64_t kMixedSubject =
    std::numeric_limits<std::int64_t>::min();

// One occurrence/exposure record. features = (t_rep, s, w_1..w_p).
struct OccExpRow {
  CovariateVector features;
  double occ = 0.0;
  double exp = 0.0;
  std::int64_t subject_id = 0;
  double weight = 1.0;

  friend bool operator==(const OccExpRow&, const OccExpRow&) = default;
};

// The Poisson regression dataset.
//
// Rows produced by one landmark draw share (s, w) and differ only in their
// time bin, so the table stores each draw's (s, w, subject) once as a
// "context" and each row as (context, time bin, occ, exp, weight). The time
// feature of a row is the representative max(left edge of its time bin, s),
// which lies in the row's cell and satisfies t_rep >= s.
class OccExpTable {
 public:
  OccExpTable() = default;
  OccExpTable(std::vector<std::string> schema, Partition partition);

  const std::vector<std::string>& schema() const { return schema_; }
  const Partition& partition() const { return partition_; }
  std::size_t num_covariates() const { return schema_.size(); }
  std::size_t num_features() const { return schema_.size() + 2; }
  std::size_t size() const { return row_context_.size(); }
  bool empty() const { return row_context_.empty(); }

  // Adds a context; s and w must already be cell representatives.
  std::size_t add_context(double s, std::span<const Covariate> w,
                          std::int64_t subject);
  void add_row(std::size_t context, std::size_t time_bin, double occ,
               double exp, double weight = 1.0);

  // Appends an arbitrary row. Grid coordinates are replaced by their cell
  // representatives; the row joins the previous context when (s, w,
  // subject) match it.
  void append(const OccExpRow& row);

  OccExpRow row(std::size_t i) const;

  // Feature f of row i; f = 0 is t_rep, f = 1 is s, f >= 2 covariates.
  Covariate feature(std::size_t i, std::size_t f) const;

  double occ(std::size_t i) const { return occ_[i]; }
  double exposure(std::size_t i) const { return exp_[i]; }
  double weight(std::size_t i) const { return weight_[i]; }
  std::int64_t subject(std::size_t i) const {
    return context_subject_[row_context_[i]];
  }
  std::size_t context_of(std::size_t i) const { return row_context_[i]; }
  std::size_t time_bin(std::size_t i) const { return row_time_bin_[i]; }

  std::size_t num_contexts() const { return context_s_.size(); }
  double context_s(std::size_t c) const { return context_s_[c]; }
  Covariate context_covariate(std::size_t c, std::size_t j) const;
  std::int64_t context_subject(std::size_t c) const {
    return context_subject_[c];
  }
  void set_context_subject(std::size_t c, std::int64_t subject) {
    context_subject_[c] = subject;
  }

  double total_occ() const;
  double total_exposure() const;

  // Rows in the given order, with their contexts re-indexed.
  OccExpTable subset(std::span<const std::size_t> rows) const;

  // Appends all rows of a table with the same schema and partition.
  void extend(const OccExpTable& other);

 private:
  std::vector<std::string> schema_;
  Partition partition_;

  std::vector<double> context_s_;
  std::vector<double> context_w_;  // num_contexts x p
  std::vector<std::uint8_t> context_missing_;
  std::vector<std::int64_t> context_subject_;

  std::vector<std::uint32_t> row_context_;
  std::vector<std::uint32_t> row_time_bin_;
  std::vector<double> occ_;
  std::vector<double> exp_;
  std::vector<double> weight_;
};

// Post-enrollment visit times: the path's jump times excluding 0.
std::vector<double> visit_times(const SubjectRecord& subject);

// Resolves one visit-based landmark from a uniform draw u on [0, T] and an
// atom selector pick in [0, 1). Returns nullopt when u <= exit but the
// subject has no post-enrollment visits.
std::optional<double> resolve_visit_landmark(const SubjectRecord& subject,
                                             double u, double pick);

std::vector<LandmarkDraw> draw_landmarks(const LandmarkScheme& scheme,
                                         const SubjectRecord& subject,
                                         const RngStream& stream);

// Draws for every subject, each on the substream keyed by its id.
std::vector<LandmarkDraw> draw_all_landmarks(
    const LandmarkScheme& scheme, std::span<const SubjectRecord> subjects,
    const RngStream& stream);

// Occurrences and exposures of each (subject, draw) pair over the time bins
// of the partition. An event lying exactly on a split point, whose own bin
// has no exposure, is attributed to the preceding bin.
OccExpTable build_super_dataset(std::span<const SubjectRecord> subjects,
                                std::span<const LandmarkDraw> draws,
                                const Partition& partition,
                                std::vector<std::string> schema);

// Merges rows with identical feature vectors, summing occ, exp and weight.
OccExpTable collapse(const OccExpTable& table);

// CSV with header t,s,<schema>,occ,exp,subject_id,weight. Missing values are
// empty fields; the partition is stored in '# partition' comment lines.
void write_table_csv(std::ostream& out, const OccExpTable& table,
                     const std::vector<std::string>& comments = {});
OccExpTable read_table_csv(std::istream& in,
                           const std::optional<Partition>& partition = {});

}  // namespace lmboost
