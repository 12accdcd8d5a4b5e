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

#include "lmboost/ingest.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lmboost/csv.hpp"
#include "lmboost/error.hpp"

namespace lmboost {

void LongitudinalSchema::validate() const {
  std::set<std::string> seen = {id_column, visit_column, exit_column,
                                status_column};
  if (seen.size() != 4) {
    throw InvalidArgument("id, visit, exit and status columns must differ");
  }
  if (seen.contains("")) throw InvalidArgument("empty column name in schema");
  if (censor_column && !seen.insert(*censor_column).second) {
    throw InvalidArgument("censor column clashes with another column");
  }
  for (const auto& c : covariates) {
    if (c.name.empty()) throw InvalidArgument("empty covariate column name");
    if (!seen.insert(c.name).second) {
      throw InvalidArgument("duplicate column '" + c.name + "' in schema");
    }
  }
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
}

std::vector<std::string> LongitudinalSchema::covariate_names() const {
  std::vector<std::string> names;
  for (const auto& c : covariates) names.push_back(c.name);
  return names;
}

LongitudinalSchema LongitudinalSchema::simulated(
    const std::vector<std::string>& names, double horizon) {
  LongitudinalSchema schema;
  schema.censor_column = "censor";
  for (const auto& n : names) schema.covariates.push_back({n, ColumnKind::kNumeric});
  schema.horizon = horizon;
  return schema;
}

LongitudinalSchema LongitudinalSchema::pbc2() {
  LongitudinalSchema schema;
  schema.id_column = "id";
  schema.visit_column = "year";
  schema.exit_column = "years";
  schema.status_column = "status";
  schema.event_statuses = {"transplanted", "dead"};
  const auto num = ColumnKind::kNumeric;
  const auto cat = ColumnKind::kCategorical;
  schema.covariates = {
      {"drug", cat},      {"age", num},          {"sex", cat},
      {"ascites", cat},   {"hepatomegaly", cat}, {"spiders", cat},
      {"edema", cat},     {"serBilir", num},     {"serChol", num},
      {"albumin", num},   {"alkaline", num},     {"SGOT", num},
      {"platelets", num}, {"prothrombin", num},  {"histologic", num},
  };
  schema.horizon = 14.31;
  return schema;
}

void write_dictionary(std::ostream& out, const CategoricalDictionary& dict) {
  out << "column,level,code\n";
  for (const auto& [column, levels] : dict) {
    for (std::size_t k = 0; k < levels.size(); ++k) {
      out << csv::quote(column) << ',' << csv::quote(levels[k]) << ',' << k
          << '\n';
    }
  }
}

CategoricalDictionary read_dictionary(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields != std::vector<std::string>{"column", "level", "code"}) {
    throw DataError("dictionary header must be column,level,code");
  }
  CategoricalDictionary dict;
  while (reader.next(fields)) {
    const auto line = std::to_string(reader.line_number());
    if (fields.size() != 3) throw DataError("dictionary line " + line + ": expected 3 fields");
    const auto code = csv::parse_int(fields[2]);
    auto& levels = dict[fields[0]];
    if (!code || *code != static_cast<std::int64_t>(levels.size())) {
      throw DataError("dictionary line " + line + ": codes must be 0, 1, ... per column");
    }
    levels.push_back(fields[1]);
  }
  return dict;
}

namespace {

struct Visit {
  double time = 0.0;
  double exit = 0.0;
  std::string status;
  std::optional<double> censor;
  CovariateVector values;
  std::size_t line = 0;
};

std::size_t column_of(const std::vector<std::string>& header,
                      const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw DataError("input lacks required column '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::vector<SubjectRecord> read_longitudinal_csv(
    std::istream& in, const LongitudinalSchema& schema,
    CategoricalDictionary& dictionary) {
  schema.validate();
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError("input has no header row");
  const std::size_t id_col = column_of(header, schema.id_column);
  const std::size_t visit_col = column_of(header, schema.visit_column);
  const std::size_t exit_col = column_of(header, schema.exit_column);
  const std::size_t status_col = column_of(header, schema.status_column);
  std::optional<std::size_t> censor_col;
  if (schema.censor_column) censor_col = column_of(header, *schema.censor_column);
  std::vector<std::size_t> cov_cols;
  for (const auto& c : schema.covariates) cov_cols.push_back(column_of(header, c.name));

  std::map<std::int64_t, std::vector<Visit>> by_subject;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::size_t line = reader.line_number();
    auto fail = [&](const std::string& what) -> DataError {
      return DataError("row " + std::to_string(line) + ": " + what);
    };
    if (fields.size() != header.size()) {
      throw fail("expected " + std::to_string(header.size()) + " fields, got " +
                 std::to_string(fields.size()));
    }
    auto number = [&](std::size_t col) {
      const auto v = csv::parse_double(fields[col]);
      if (!v) {
        throw fail("non-numeric value '" + fields[col] + "' in column '" +
                   header[col] + "'");
      }
      return *v;
    };
    const auto id = csv::parse_int(fields[id_col]);
    if (!id) throw fail("subject id '" + fields[id_col] + "' is not an integer");
    Visit visit;
    visit.line = line;
    visit.time = number(visit_col);
    visit.exit = number(exit_col);
    visit.status = fields[status_col];
    if (censor_col) visit.censor = number(*censor_col);
    if (visit.time < 0.0) throw fail("negative visit time");
    visit.values.resize(cov_cols.size());
    for (std::size_t j = 0; j < cov_cols.size(); ++j) {
      const std::string& text = fields[cov_cols[j]];
      if (text == schema.missing_token) continue;
      if (schema.covariates[j].kind == ColumnKind::kNumeric) {
        visit.values[j] = number(cov_cols[j]);
      } else {
        auto& levels = dictionary[schema.covariates[j].name];
        auto it = std::find(levels.begin(), levels.end(), text);
        if (it == levels.end()) {
          levels.push_back(text);
          it = levels.end() - 1;
        }
        visit.values[j] = static_cast<double>(it - levels.begin());
      }
    }
    by_subject[*id].push_back(std::move(visit));
  }

  std::vector<SubjectRecord> subjects;
  subjects.reserve(by_subject.size());
  for (auto& [id, visits] : by_subject) {
    const std::string who = "subject " + std::to_string(id);
    std::stable_sort(visits.begin(), visits.end(),
                     [](const Visit& a, const Visit& b) { return a.time < b.time; });
    std::vector<double> times;
    std::vector<CovariateVector> values;
    for (std::size_t k = 0; k < visits.size(); ++k) {
      const Visit& v = visits[k];
      if (v.exit != visits[0].exit || v.status != visits[0].status ||
          v.censor != visits[0].censor) {
        throw DataError(who + ": exit, status and censor differ between rows " +
                        std::to_string(visits[0].line) + " and " +
                        std::to_string(v.line));
      }
      if (k > 0 && v.time == visits[k - 1].time) {
        throw DataError(who + ": duplicate visit time " +
                        csv::format_double(v.time) + " (rows " +
                        std::to_string(visits[k - 1].line) + " and " +
                        std::to_string(v.line) + ")");
      }
      if (k == 0 && v.time > 0.0) {
        times.push_back(0.0);
        values.emplace_back(cov_cols.size());
      }
      times.push_back(v.time);
      values.push_back(v.values);
    }
    const Visit& first = visits.front();
    const bool event =
        std::find(schema.event_statuses.begin(), schema.event_statuses.end(),
                  first.status) != schema.event_statuses.end();
    std::optional<double> event_time;
    if (event) event_time = first.exit;
    const double censor = first.censor.value_or(first.exit);
    subjects.emplace_back(id, CovariatePath(std::move(times), std::move(values)),
                          event_time, censor, schema.horizon);
  }
  return subjects;
}

std::vector<SubjectRecord> read_longitudinal_csv(
    const std::string& path, const LongitudinalSchema& schema,
    CategoricalDictionary& dictionary) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_longitudinal_csv(in, schema, dictionary);
}

void write_longitudinal_csv(std::ostream& out,
                            std::span<const SubjectRecord> subjects,
                            const std::vector<std::string>& names,
                            const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "id,visit,exit,status,censor";
  for (const auto& n : names) out << ',' << csv::quote(n);
  out << '\n';
  for (const SubjectRecord& subject : subjects) {
    const auto& path = subject.path();
    if (path.dimension() != names.size()) {
      throw InvalidArgument("subject " + std::to_string(subject.id()) +
                            " has the wrong number of covariates");
    }
    const std::string prefix = std::to_string(subject.id());
    const std::string tail =
        csv::format_double(subject.exit_time()) + ',' +
        (subject.has_event() ? "event" : "censored") + ',' +
        csv::format_double(subject.censor_time());
    for (std::size_t k = 0; k < path.num_segments(); ++k) {
      out << prefix << ',' << csv::format_double(path.jump_times()[k]) << ','
          << tail;
      for (const Covariate& v : path.values()[k]) {
        out << ',';
        if (v) out << csv::format_double(*v);
      }
      out << '\n';
    }
  }
}

double visit_uniformity_ks(std::span<const SubjectRecord> subjects) {
  std::vector<double> u;
  for (const SubjectRecord& subject : subjects) {
    const double exit = subject.exit_time();
    for (double v : subject.path().jump_times()) {
      if (v > 0.0 && v < exit) u.push_back(v / exit);
    }
  }
  if (u.empty()) throw InvalidArgument("no post-enrollment visits");
  std::sort(u.begin(), u.end());
  const auto n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double k = static_cast<double>(i);
    d = std::max({d, (k + 1.0) / n - u[i], u[i] - k / n});
  }
  return d;
}

}  // namespace lmboost
