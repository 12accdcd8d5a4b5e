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

#include "lmboost/landmark.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "lmboost/csv.hpp"
#include "lmboost/error.hpp"
#include "lmboost/parallel.hpp"

namespace lmboost {
namespace {

constexpr std::size_t kDrawsPerChunk = 2048;

bool same_covariate(double a, bool a_missing, double b, bool b_missing) {
  return a_missing == b_missing && (a_missing || a == b);
}

// Orders missing before any number.
int compare_covariate(double a, bool a_missing, double b, bool b_missing) {
  if (a_missing != b_missing) return a_missing ? -1 : 1;
  if (a_missing || a == b) return 0;
  return a < b ? -1 : 1;
}

}  // namespace

void LandmarkScheme::validate() const {
  if (Q < 1) throw InvalidArgument("landmark scheme needs Q >= 1");
  if (!(horizon > 0.0)) throw InvalidArgument("landmark horizon must be > 0");
}

OccExpTable::OccExpTable(std::vector<std::string> schema, Partition partition)
    : schema_(std::move(schema)), partition_(std::move(partition)) {
  if (partition_.dims() != schema_.size() + 2) {
    throw InvalidArgument("partition has " + std::to_string(partition_.dims()) +
                          " dimensions but the schema needs " +
                          std::to_string(schema_.size() + 2));
  }
}

std::size_t OccExpTable::add_context(double s, std::span<const Covariate> w,
                                     std::int64_t subject) {
  if (w.size() != schema_.size()) {
    throw InvalidArgument("covariate vector does not match the schema");
  }
  context_s_.push_back(s);
  for (const Covariate& v : w) {
    context_w_.push_back(v ? *v : 0.0);
    context_missing_.push_back(v ? 0 : 1);
  }
  context_subject_.push_back(subject);
  return context_s_.size() - 1;
}

void OccExpTable::add_row(std::size_t context, std::size_t time_bin,
                          double occ, double exp, double weight) {
  if (!(exp > 0.0)) throw InvalidArgument("rows need positive exposure");
  row_context_.push_back(static_cast<std::uint32_t>(context));
  row_time_bin_.push_back(static_cast<std::uint32_t>(time_bin));
  occ_.push_back(occ);
  exp_.push_back(exp);
  weight_.push_back(weight);
}

void OccExpTable::append(const OccExpRow& row) {
  const std::size_t p = schema_.size();
  if (row.features.size() != p + 2) {
    throw InvalidArgument("row has the wrong number of features");
  }
  if (!row.features[0] || !row.features[1]) {
    throw InvalidArgument("t and s cannot be missing");
  }
  const double t = *row.features[0];
  const double s = *row.features[1];
  if (t < s) throw InvalidArgument("row has t < s");

  const double s_rep = partition_.representative(Partition::kLandmarkDim, s);
  CovariateVector w(p);
  for (std::size_t j = 0; j < p; ++j) {
    const Covariate& v = row.features[Partition::kFirstCovariateDim + j];
    if (v) w[j] = partition_.representative(Partition::kFirstCovariateDim + j, *v);
  }
  const std::size_t tbin = partition_.bin_of(Partition::kTimeDim, t);

  bool reuse = !context_s_.empty();
  if (reuse) {
    const std::size_t c = context_s_.size() - 1;
    reuse = context_s_[c] == s_rep && context_subject_[c] == row.subject_id;
    for (std::size_t j = 0; reuse && j < p; ++j) {
      reuse = same_covariate(context_w_[c * p + j], context_missing_[c * p + j],
                             w[j] ? *w[j] : 0.0, !w[j]);
    }
  }
  const std::size_t context =
      reuse ? context_s_.size() - 1 : add_context(s_rep, w, row.subject_id);
  add_row(context, tbin, row.occ, row.exp, row.weight);
}

Covariate OccExpTable::context_covariate(std::size_t c, std::size_t j) const {
  const std::size_t k = c * schema_.size() + j;
  if (context_missing_[k]) return std::nullopt;
  return context_w_[k];
}

Covariate OccExpTable::feature(std::size_t i, std::size_t f) const {
  const std::size_t c = row_context_[i];
  if (f == Partition::kTimeDim) {
    return std::max(partition_.splits(Partition::kTimeDim)[row_time_bin_[i]],
                    context_s_[c]);
  }
  if (f == Partition::kLandmarkDim) return context_s_[c];
  return context_covariate(c, f - Partition::kFirstCovariateDim);
}

OccExpRow OccExpTable::row(std::size_t i) const {
  OccExpRow r;
  r.features.resize(num_features());
  for (std::size_t f = 0; f < num_features(); ++f) r.features[f] = feature(i, f);
  r.occ = occ_[i];
  r.exp = exp_[i];
  r.subject_id = subject(i);
  r.weight = weight_[i];
  return r;
}

double OccExpTable::total_occ() const {
  double total = 0.0;
  for (double o : occ_) total += o;
  return total;
}

double OccExpTable::total_exposure() const {
  double total = 0.0;
  for (double e : exp_) total += e;
  return total;
}

OccExpTable OccExpTable::subset(std::span<const std::size_t> rows) const {
  OccExpTable out(schema_, partition_);
  const std::size_t p = schema_.size();
  std::vector<std::uint32_t> remap(num_contexts(),
                                   std::numeric_limits<std::uint32_t>::max());
  for (std::size_t i : rows) {
    const std::size_t c = row_context_[i];
    if (remap[c] == std::numeric_limits<std::uint32_t>::max()) {
      remap[c] = static_cast<std::uint32_t>(out.context_s_.size());
      out.context_s_.push_back(context_s_[c]);
      out.context_w_.insert(out.context_w_.end(), context_w_.begin() + c * p,
                            context_w_.begin() + (c + 1) * p);
      out.context_missing_.insert(out.context_missing_.end(),
                                  context_missing_.begin() + c * p,
                                  context_missing_.begin() + (c + 1) * p);
      out.context_subject_.push_back(context_subject_[c]);
    }
    out.row_context_.push_back(remap[c]);
    out.row_time_bin_.push_back(row_time_bin_[i]);
    out.occ_.push_back(occ_[i]);
    out.exp_.push_back(exp_[i]);
    out.weight_.push_back(weight_[i]);
  }
  return out;
}

void OccExpTable::extend(const OccExpTable& other) {
  if (other.schema_ != schema_ || !(other.partition_ == partition_)) {
    throw InvalidArgument("cannot extend a table with a different layout");
  }
  const auto offset = static_cast<std::uint32_t>(context_s_.size());
  context_s_.insert(context_s_.end(), other.context_s_.begin(),
                    other.context_s_.end());
  context_w_.insert(context_w_.end(), other.context_w_.begin(),
                    other.context_w_.end());
  context_missing_.insert(context_missing_.end(),
                          other.context_missing_.begin(),
                          other.context_missing_.end());
  context_subject_.insert(context_subject_.end(),
                          other.context_subject_.begin(),
                          other.context_subject_.end());
  for (std::uint32_t c : other.row_context_) row_context_.push_back(c + offset);
  row_time_bin_.insert(row_time_bin_.end(), other.row_time_bin_.begin(),
                       other.row_time_bin_.end());
  occ_.insert(occ_.end(), other.occ_.begin(), other.occ_.end());
  exp_.insert(exp_.end(), other.exp_.begin(), other.exp_.end());
  weight_.insert(weight_.end(), other.weight_.begin(), other.weight_.end());
}

std::vector<double> visit_times(const SubjectRecord& subject) {
  const auto& jumps = subject.path().jump_times();
  return std::vector<double>(jumps.begin() + 1, jumps.end());
}

std::optional<double> resolve_visit_landmark(const SubjectRecord& subject,
                                             double u, double pick) {
  if (u > subject.exit_time()) return u;
  const auto visits = visit_times(subject);
  if (visits.empty()) return std::nullopt;
  const auto n = visits.size();
  const auto atom = std::min(n - 1, static_cast<std::size_t>(pick * n));
  return visits[atom];
}

std::vector<LandmarkDraw> draw_landmarks(const LandmarkScheme& scheme,
                                         const SubjectRecord& subject,
                                         const RngStream& stream) {
  scheme.validate();
  auto eng = stream.engine();
  std::uniform_real_distribution<double> unif(0.0, scheme.horizon);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<LandmarkDraw> draws;
  draws.reserve(static_cast<std::size_t>(scheme.Q));
  for (int q = 1; q <= scheme.Q; ++q) {
    const double u = unif(eng);
    if (scheme.kind == LandmarkKind::kUniformOnT) {
      draws.push_back({subject.id(), q, u});
      continue;
    }
    const double pick = unit(eng);
    if (const auto s = resolve_visit_landmark(subject, u, pick)) {
      draws.push_back({subject.id(), q, *s});
    } else {
      spdlog::debug("subject {}: landmark {} discarded, no post-enrollment "
                    "visits",
                    subject.id(), q);
    }
  }
  return draws;
}

std::vector<LandmarkDraw> draw_all_landmarks(
    const LandmarkScheme& scheme, std::span<const SubjectRecord> subjects,
    const RngStream& stream) {
  const RngStream base = stream.child(stream_tag::kLandmarks);
  std::vector<std::vector<LandmarkDraw>> per_subject(subjects.size());
  parallel_for(subjects.size(), [&](std::size_t i) {
    per_subject[i] = draw_landmarks(
        scheme, subjects[i],
        base.child(static_cast<std::uint64_t>(subjects[i].id())));
  });
  std::vector<LandmarkDraw> draws;
  for (auto& d : per_subject) draws.insert(draws.end(), d.begin(), d.end());
  return draws;
}

OccExpTable build_super_dataset(std::span<const SubjectRecord> subjects,
                                std::span<const LandmarkDraw> draws,
                                const Partition& partition,
                                std::vector<std::string> schema) {
  std::unordered_map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (!index.emplace(subjects[i].id(), i).second) {
      throw DataError("duplicate subject id " +
                      std::to_string(subjects[i].id()));
    }
  }
  const std::size_t p = schema.size();
  const auto& tgrid = partition.splits(Partition::kTimeDim);

  const std::size_t chunks = (draws.size() + kDrawsPerChunk - 1) / kDrawsPerChunk;
  std::vector<OccExpTable> parts(chunks, OccExpTable(schema, partition));
  parallel_for(chunks, [&](std::size_t chunk) {
    OccExpTable& part = parts[chunk];
    const std::size_t end = std::min(draws.size(), (chunk + 1) * kDrawsPerChunk);
    CovariateVector w(p);
    std::vector<std::size_t> bins;
    std::vector<double> exposures;
    for (std::size_t d = chunk * kDrawsPerChunk; d < end; ++d) {
      const LandmarkDraw& draw = draws[d];
      const auto it = index.find(draw.subject_id);
      if (it == index.end()) {
        throw DataError("landmark draw references unknown subject " +
                        std::to_string(draw.subject_id));
      }
      const SubjectRecord& subject = subjects[it->second];
      const double s = draw.s;
      const double exit = subject.exit_time();
      if (!(s < exit)) continue;
      if (exit > tgrid.back()) throw OutOfDomain(Partition::kTimeDim, exit);

      const CovariateVector& ws = value_at(subject.path(), s);
      if (ws.size() != p) {
        throw DataError("subject " + std::to_string(subject.id()) +
                        " has a covariate path of the wrong dimension");
      }
      for (std::size_t j = 0; j < p; ++j) {
        w[j] = ws[j] ? Covariate(partition.representative(
                           Partition::kFirstCovariateDim + j, *ws[j]))
                     : std::nullopt;
      }
      const std::size_t context = part.add_context(
          partition.representative(Partition::kLandmarkDim, s), w,
          subject.id());

      bins.clear();
      exposures.clear();
      for (std::size_t j = partition.bin_of(Partition::kTimeDim, s);
           j + 1 < tgrid.size() && tgrid[j] < exit; ++j) {
        const double lo = std::max(tgrid[j], s);
        const double hi = std::min(tgrid[j + 1], exit);
        if (!(hi > lo)) continue;
        bins.push_back(j);
        exposures.push_back(hi - lo);
      }
      // An observed event after s is the exit time, so it falls in the last
      // bin with exposure: the bin holding it, or the preceding one when it
      // sits exactly on a split point.
      const bool event = subject.has_event() && *subject.event_time() > s;
      for (std::size_t k = 0; k < bins.size(); ++k) {
        const bool last = k + 1 == bins.size();
        part.add_row(context, bins[k], event && last ? 1.0 : 0.0,
                     exposures[k]);
      }
    }
  });

  OccExpTable table(std::move(schema), partition);
  for (const auto& part : parts) table.extend(part);
  return table;
}

OccExpTable collapse(const OccExpTable& table) {
  const std::size_t p = table.num_covariates();
  const std::size_t nc = table.num_contexts();

  auto compare_contexts = [&](std::size_t a, std::size_t b) {
    const double sa = table.context_s(a);
    const double sb = table.context_s(b);
    if (sa != sb) return sa < sb ? -1 : 1;
    for (std::size_t j = 0; j < p; ++j) {
      const Covariate va = table.context_covariate(a, j);
      const Covariate vb = table.context_covariate(b, j);
      const int c = compare_covariate(va.value_or(0.0), !va, vb.value_or(0.0),
                                      !vb);
      if (c != 0) return c;
    }
    return 0;
  };

  std::vector<std::size_t> order(nc);
  for (std::size_t c = 0; c < nc; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return compare_contexts(a, b) < 0;
  });

  OccExpTable out(table.schema(), table.partition());
  std::vector<std::size_t> remap(nc);
  CovariateVector w(p);
  for (std::size_t k = 0; k < nc; ++k) {
    const std::size_t c = order[k];
    if (k > 0 && compare_contexts(order[k - 1], c) == 0) {
      const std::size_t merged = remap[order[k - 1]];
      remap[c] = merged;
      if (out.context_subject(merged) != table.context_subject(c)) {
        out.set_context_subject(merged, kMixedSubject);
      }
      continue;
    }
    for (std::size_t j = 0; j < p; ++j) w[j] = table.context_covariate(c, j);
    remap[c] = out.add_context(table.context_s(c), w, table.context_subject(c));
  }

  std::vector<std::size_t> rows(table.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  auto key = [&](std::size_t i) {
    return std::pair(remap[table.context_of(i)], table.time_bin(i));
  };
  std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    return key(a) < key(b);
  });

  for (std::size_t k = 0; k < rows.size();) {
    const auto group = key(rows[k]);
    double occ = 0.0, exp = 0.0, weight = 0.0;
    for (; k < rows.size() && key(rows[k]) == group; ++k) {
      occ += table.occ(rows[k]);
      exp += table.exposure(rows[k]);
      weight += table.weight(rows[k]);
    }
    out.add_row(group.first, group.second, occ, exp, weight);
  }
  return out;
}

void write_table_csv(std::ostream& out, const OccExpTable& table,
                     const std::vector<std::string>& comments) {
  for (const auto& c : comments) {
    out << (c.starts_with("#") ? "" : "# ") << c << '\n';
  }
  const Partition& partition = table.partition();
  for (std::size_t d = 0; d < partition.dims(); ++d) {
    out << "# partition " << d;
    if (partition.is_raw(d)) {
      out << " raw";
    } else {
      for (double b : partition.splits(d)) out << ' ' << csv::format_double(b);
    }
    out << '\n';
  }
  out << "t,s";
  for (const auto& name : table.schema()) out << ',' << csv::quote(name);
  out << ",occ,exp,subject_id,weight\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t f = 0; f < table.num_features(); ++f) {
      if (f > 0) out << ',';
      if (const Covariate v = table.feature(i, f)) out << csv::format_double(*v);
    }
    out << ',' << csv::format_double(table.occ(i)) << ','
        << csv::format_double(table.exposure(i)) << ',';
    if (table.subject(i) == kMixedSubject) {
      out << "mixed";
    } else {
      out << table.subject(i);
    }
    out << ',' << csv::format_double(table.weight(i)) << '\n';
  }
}

namespace {

Partition partition_from_comments(const std::vector<std::string>& comments,
                                  std::size_t dims) {
  std::vector<std::vector<double>> splits(dims);
  std::vector<bool> seen(dims, false);
  for (const auto& line : comments) {
    std::istringstream in(line);
    std::string hash, tag;
    std::size_t d = 0;
    if (!(in >> hash >> tag) || tag != "partition") continue;
    if (!(in >> d) || d >= dims) {
      throw DataError("malformed partition line: " + line);
    }
    std::string token;
    while (in >> token) {
      if (token == "raw") break;
      const auto v = csv::parse_double(token);
      if (!v) throw DataError("malformed partition line: " + line);
      splits[d].push_back(*v);
    }
    seen[d] = true;
  }
  for (std::size_t d = 0; d < dims; ++d) {
    if (!seen[d]) {
      throw DataError("table file lacks the partition of dimension " +
                      std::to_string(d));
    }
  }
  return Partition(std::move(splits));
}

}  // namespace

OccExpTable read_table_csv(std::istream& in,
                           const std::optional<Partition>& partition) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError("table file is empty");
  if (header.size() < 6 || header[0] != "t" || header[1] != "s" ||
      header[header.size() - 4] != "occ" || header[header.size() - 3] != "exp" ||
      header[header.size() - 2] != "subject_id" || header.back() != "weight") {
    throw DataError("table header must be t,s,<covariates>,occ,exp,subject_id,weight");
  }
  std::vector<std::string> schema(header.begin() + 2, header.end() - 4);
  const std::size_t dims = schema.size() + 2;
  OccExpTable table(schema, partition ? *partition
                                      : partition_from_comments(reader.comments(), dims));

  std::vector<std::string> fields;
  OccExpRow row;
  row.features.resize(dims);
  while (reader.next(fields)) {
    const auto line = std::to_string(reader.line_number());
    if (fields.size() != header.size()) {
      throw DataError("table line " + line + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    for (std::size_t f = 0; f < dims; ++f) {
      if (fields[f].empty()) {
        row.features[f].reset();
        continue;
      }
      const auto v = csv::parse_double(fields[f]);
      if (!v) throw DataError("table line " + line + ": non-numeric feature");
      row.features[f] = *v;
    }
    const auto occ = csv::parse_double(fields[dims]);
    const auto exp = csv::parse_double(fields[dims + 1]);
    const auto weight = csv::parse_double(fields[dims + 3]);
    if (!occ || !exp || !weight) {
      throw DataError("table line " + line + ": non-numeric occ/exp/weight");
    }
    if (fields[dims + 2] == "mixed") {
      row.subject_id = kMixedSubject;
    } else if (const auto id = csv::parse_int(fields[dims + 2])) {
      row.subject_id = *id;
    } else {
      throw DataError("table line " + line + ": bad subject_id");
    }
    row.occ = *occ;
    row.exp = *exp;
    row.weight = *weight;
    table.append(row);
  }
  return table;
}

}  // namespace lmboost
