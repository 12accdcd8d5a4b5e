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

#include "lmboost/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lmboost/boost.hpp"
#include "lmboost/csv.hpp"
#include "lmboost/error.hpp"
#include "lmboost/evaluate.hpp"
#include "lmboost/explain.hpp"
#include "lmboost/ingest.hpp"
#include "lmboost/landmark.hpp"
#include "lmboost/parallel.hpp"
#include "lmboost/predict.hpp"
#include "lmboost/simulate.hpp"

namespace lmboost::cli {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint64_t> parse_uint_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    const auto v = csv::parse_int(s);
    if (!v || *v < 0) {
      throw InvalidArgument("'" + s + "' in list '" + text +
                            "' is not a non-negative integer");
    }
    return static_cast<std::uint64_t>(*v);
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    const std::uint64_t lo = number(item.substr(0, dots));
    const std::uint64_t hi = number(item.substr(dots + 2));
    if (hi < lo) throw InvalidArgument("empty range '" + item + "'");
    for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty list '" + text + "'");
  return out;
}

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = csv::parse_double(item);
    if (!v) throw InvalidArgument("'" + item + "' is not a number");
    out.push_back(*v);
  }
  if (out.empty()) throw InvalidArgument("empty list '" + text + "'");
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

// Boosting flags shared by several commands; unset flags keep the
// command's base parameters.
struct BoostFlags {
  std::optional<double> eta;
  std::optional<int> max_depth;
  std::optional<int> nrounds;
  std::optional<double> min_child_weight;
  std::optional<double> subsample;
  std::optional<double> colsample_bytree;
  std::optional<double> alpha;
  std::optional<std::string> mode;
  std::optional<double> hazard_lo;
  std::optional<double> hazard_hi;

  void add(CLI::App* app) {
    app->add_option("--eta", eta, "Learning rate");
    app->add_option("--max-depth", max_depth, "Tree depth");
    app->add_option("--nrounds", nrounds, "Number of trees");
    app->add_option("--min-child-weight", min_child_weight,
                    "Minimum hessian sum per child");
    app->add_option("--subsample", subsample, "Row fraction per tree");
    app->add_option("--colsample-bytree", colsample_bytree,
                    "Feature fraction per tree");
    app->add_option("--alpha", alpha, "L1 penalty on Newton leaves");
    app->add_option("--mode", mode, "newton or gradient");
    app->add_option("--hazard-lo", hazard_lo, "Lower hazard cap");
    app->add_option("--hazard-hi", hazard_hi, "Upper hazard cap");
  }

  BoostParams apply(BoostParams p) const {
    if (eta) p.eta = *eta;
    if (max_depth) p.max_depth = *max_depth;
    if (nrounds) p.nrounds = *nrounds;
    if (min_child_weight) p.min_child_weight = *min_child_weight;
    if (subsample) p.subsample = *subsample;
    if (colsample_bytree) p.colsample_bytree = *colsample_bytree;
    if (alpha) p.alpha = *alpha;
    if (mode) p.mode = parse_boost_mode(*mode);
    if (hazard_lo) {
      if (!(*hazard_lo > 0.0)) throw InvalidArgument("hazard-lo must be > 0");
      p.cap.log_lambda_lo = std::log(*hazard_lo);
    }
    if (hazard_hi) {
      if (!(*hazard_hi > 0.0)) throw InvalidArgument("hazard-hi must be > 0");
      p.cap.log_lambda_hi = std::log(*hazard_hi);
    }
    p.validate();
    return p;
  }
};

struct DataFlags {
  std::string data;
  std::string format = "sim";
  std::optional<double> horizon;
  std::string dict;

  void add(CLI::App* app, bool required) {
    auto* opt = app->add_option("--data", data, "Longitudinal CSV");
    if (required) opt->required();
    app->add_option("--format", format, "sim or pbc2")
        ->check(CLI::IsMember({"sim", "pbc2"}));
    app->add_option("--horizon", horizon, "Prediction horizon T");
    app->add_option("--dict", dict,
                    "Where to write the categorical dictionary");
  }
};

struct SchemeFlags {
  int Q = 1;
  std::string scheme;  // empty: uniform for sim, visit for pbc2
  std::optional<double> t_step;
  double s_step = 0.0;

  void add(CLI::App* app) {
    app->add_option("--Q", Q, "Landmarks per subject");
    app->add_option("--scheme", scheme, "uniform or visit")
        ->check(CLI::IsMember({"uniform", "visit"}));
    app->add_option("--t-step", t_step, "Time grid step");
    app->add_option("--s-step", s_step, "Landmark grid step (0 = raw)");
  }
};

struct Options {
  std::size_t threads = 0;
  bool verbose = false;

  std::string scenario = "1";
  std::size_t n = 100;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  double rate = 0.5;
  double markov_a = 0.2;
  double markov_b = 0.6;
  double flip = 2.0;

  DataFlags data;
  SchemeFlags scheme;
  bool no_collapse = false;

  std::string table;
  std::string model;
  BoostFlags boost;
  int folds = 5;
  int max_rounds = 300;
  int cv_folds = 0;

  std::string queries;
  int bootstrap = 0;

  std::size_t n_test = 1000;
  std::size_t oracle_sims = 10000;
  std::size_t label_n = 0;
  int label_q = 0;
  std::string metrics = "rmse";

  std::string feature;
  std::size_t points = 20;
  std::string grid;
  bool log_scale = false;
  std::string rug_out;
  std::size_t bins = 10;

  std::string n_list;
  std::string q_list;
  std::string seed_list;
  double study_t_step = 0.01;
};

class Artifacts {
 public:
  Artifacts(std::string command, std::uint64_t hash,
            std::optional<std::uint64_t> seed, std::ostream& out,
            std::ostream& err)
      : command_(std::move(command)),
        hash_(hash),
        seed_(seed),
        out_(out),
        err_(err) {}

  std::vector<std::string> header() const {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(hash_));
    return {std::string("lmboost ") + kVersion + " command=" + command_ +
            " config=" + hex +
            " seed=" + (seed_ ? std::to_string(*seed_) : std::string("none"))};
  }

  void write(const std::string& path,
             const std::function<void(std::ostream&)>& body) const {
    if (path == "-") {
      body(out_);
      return;
    }
    std::ofstream file(path);
    if (!file) throw DataError("cannot open '" + path + "' for writing");
    body(file);
    if (!file) throw DataError("failed writing '" + path + "'");
  }

  // One-line summary; kept off stdout when the artifact itself went there.
  void summary(const std::string& path, const std::string& text) const {
    (path == "-" ? err_ : out_) << text << '\n';
  }

 private:
  std::string command_;
  std::uint64_t hash_;
  std::optional<std::uint64_t> seed_;
  std::ostream& out_;
  std::ostream& err_;
};

void write_comment_lines(std::ostream& out,
                         const std::vector<std::string>& lines) {
  for (const auto& l : lines) out << "# " << l << '\n';
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

struct LoadedData {
  std::vector<SubjectRecord> subjects;
  std::vector<std::string> names;
  double horizon = 1.0;
};

LoadedData load_subjects(const DataFlags& flags, const Artifacts& art) {
  LongitudinalSchema schema;
  if (flags.format == "pbc2") {
    schema = LongitudinalSchema::pbc2();
  } else {
    auto in = open_input(flags.data);
    csv::Reader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) throw DataError("'" + flags.data + "' is empty");
    const std::vector<std::string> fixed = {"id", "visit", "exit", "status",
                                            "censor"};
    if (header.size() < fixed.size() ||
        !std::equal(fixed.begin(), fixed.end(), header.begin())) {
      throw DataError("'" + flags.data +
                      "' must start with columns id,visit,exit,status,censor");
    }
    schema = LongitudinalSchema::simulated(
        {header.begin() + static_cast<std::ptrdiff_t>(fixed.size()),
         header.end()},
        1.0);
  }
  if (flags.horizon) schema.horizon = *flags.horizon;
  CategoricalDictionary dict;
  LoadedData loaded;
  loaded.subjects = read_longitudinal_csv(flags.data, schema, dict);
  loaded.names = schema.covariate_names();
  loaded.horizon = schema.horizon;
  if (!flags.dict.empty()) {
    art.write(flags.dict, [&](std::ostream& o) {
      write_comment_lines(o, art.header());
      write_dictionary(o, dict);
    });
  }
  return loaded;
}

LandmarkScheme make_scheme(const SchemeFlags& flags, const DataFlags& data,
                           double horizon) {
  LandmarkScheme scheme;
  std::string kind = flags.scheme;
  if (kind.empty()) kind = data.format == "pbc2" ? "visit" : "uniform";
  scheme.kind =
      kind == "visit" ? LandmarkKind::kVisitBased : LandmarkKind::kUniformOnT;
  scheme.Q = flags.Q;
  scheme.horizon = horizon;
  scheme.validate();
  return scheme;
}

Partition make_partition(const SchemeFlags& flags, const DataFlags& data,
                         double horizon, std::size_t p) {
  const double t_step =
      flags.t_step.value_or(data.format == "pbc2" ? 1.0 / 12.0 : 0.01);
  return Partition::for_horizon(horizon, t_step, flags.s_step, p);
}

OccExpTable load_table(const std::string& path) {
  auto in = open_input(path);
  return read_table_csv(in);
}

BoostModel load_model(const std::string& path) {
  auto in = open_input(path);
  return read_model(in);
}

// Commands.

void cmd_simulate(const Options& o, const Artifacts& art) {
  const RngStream root(*o.seed);
  Scenario sc = make_scenario(o.scenario, root, o.rate, o.markov_a,
                              o.markov_b, o.flip);
  auto subjects = simulate_cohort(sc, o.n, root);
  std::size_t events = 0;
  for (const auto& s : subjects) events += s.has_event() ? 1 : 0;
  art.write(o.out, [&](std::ostream& f) {
    write_longitudinal_csv(f, subjects, sc.covariate_names(), art.header());
  });
  art.summary(o.out, "simulate: " + std::to_string(subjects.size()) +
                         " subjects, " + std::to_string(events) +
                         " events -> " + o.out);
}

void cmd_landmark(const Options& o, const Artifacts& art) {
  LoadedData data = load_subjects(o.data, art);
  const LandmarkScheme scheme = make_scheme(o.scheme, o.data, data.horizon);
  const Partition partition =
      make_partition(o.scheme, o.data, data.horizon, data.names.size());
  auto draws = draw_all_landmarks(scheme, data.subjects, RngStream(*o.seed));
  OccExpTable table =
      build_super_dataset(data.subjects, draws, partition, data.names);
  if (!o.no_collapse) table = collapse(table);
  art.write(o.out, [&](std::ostream& f) {
    write_table_csv(f, table, art.header());
  });
  art.summary(o.out, "landmark: " + std::to_string(draws.size()) +
                         " landmarks, " + std::to_string(table.size()) +
                         " rows, occ=" + csv::format_double(table.total_occ()) +
                         " -> " + o.out);
}

void cmd_fit(const Options& o, const Artifacts& art) {
  OccExpTable table = load_table(o.table);
  BoostParams params = o.boost.apply(BoostParams{});
  params.seed = *o.seed;
  const RngStream root(*o.seed);
  std::string cv_note;
  if (o.cv_folds > 0) {
    CvResult cv = cross_validate_nrounds(table, params, o.cv_folds,
                                         o.max_rounds, root, true);
    params.nrounds = cv.selected_nrounds;
    cv_note = " (cv selected)";
  }
  BoostModel model = boost_fit(table, params, root);
  art.write(o.out, [&](std::ostream& f) {
    write_model(f, model, art.header());
  });
  art.summary(o.out, "fit: " + std::to_string(model.trees.size()) +
                         " trees" + cv_note + ", base_score=" +
                         csv::format_double(model.base_score) + " -> " +
                         o.out);
}

void cmd_cv(const Options& o, const Artifacts& art) {
  OccExpTable table = load_table(o.table);
  BoostParams params = o.boost.apply(BoostParams{});
  params.seed = *o.seed;
  CvResult cv = cross_validate_nrounds(table, params, o.folds, o.max_rounds,
                                       RngStream(*o.seed), true);
  art.write(o.out, [&](std::ostream& f) {
    write_comment_lines(f, art.header());
    f << "nrounds,deviance\n";
    for (std::size_t r = 0; r < cv.deviance.size(); ++r) {
      f << r << ',' << csv::format_double(cv.deviance[r]) << '\n';
    }
  });
  art.summary(o.out, "cv: selected nrounds=" +
                         std::to_string(cv.selected_nrounds) + " over " +
                         std::to_string(cv.folds_used) + " folds -> " + o.out);
}

void cmd_predict(const Options& o, const Artifacts& art) {
  const BoostModel model = load_model(o.model);
  auto in = open_input(o.queries);
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError("query file is empty");
  auto col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError("query file lacks column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t s_col = col("s");
  const std::size_t t_col = col("t");
  std::vector<std::size_t> w_cols;
  for (const auto& name : model.schema) w_cols.push_back(col(name));

  struct Query {
    double s, t;
    CovariateVector w;
  };
  std::vector<Query> queries;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::string row = std::to_string(reader.line_number());
    if (fields.size() != header.size()) {
      throw DataError("query row " + row + ": wrong number of fields");
    }
    auto num = [&](std::size_t c) {
      const auto v = csv::parse_double(fields[c]);
      if (!v) {
        throw DataError("query row " + row + ": non-numeric '" + fields[c] +
                        "' in column '" + header[c] + "'");
      }
      return *v;
    };
    Query q{num(s_col), num(t_col), {}};
    for (std::size_t c : w_cols) {
      q.w.push_back(fields[c].empty() ? Covariate{} : Covariate{num(c)});
    }
    queries.push_back(std::move(q));
  }

  std::vector<BoostModel> boot;
  if (o.bootstrap > 0) {
    if (!o.seed) throw InvalidArgument("--bootstrap requires --seed");
    if (o.data.data.empty()) throw InvalidArgument("--bootstrap requires --data");
    LoadedData data = load_subjects(o.data, art);
    if (data.names != model.schema) {
      throw DataError("bootstrap data covariates do not match the model");
    }
    BoostParams params = o.boost.apply(BoostParams{});
    params.seed = *o.seed;
    boot = bootstrap_models(data.subjects,
                            make_scheme(o.scheme, o.data, data.horizon),
                            model.partition, model.schema, params,
                            o.bootstrap, RngStream(*o.seed));
  }

  art.write(o.out, [&](std::ostream& f) {
    write_comment_lines(f, art.header());
    f << "s,t";
    for (const auto& name : model.schema) f << ',' << csv::quote(name);
    f << ",log_hazard,survival";
    if (!boot.empty()) f << ",survival_lo,survival_hi";
    f << '\n';
    for (const Query& q : queries) {
      f << csv::format_double(q.s) << ',' << csv::format_double(q.t);
      for (const Covariate& v : q.w) {
        f << ',';
        if (v) f << csv::format_double(*v);
      }
      f << ',' << csv::format_double(predict_log_hazard(model, q.t, q.s, q.w))
        << ',' << csv::format_double(predict_survival(model, q.s, q.w, q.t));
      if (!boot.empty()) {
        std::vector<double> values;
        for (const auto& m : boot) {
          values.push_back(predict_survival(m, q.s, q.w, q.t));
        }
        f << ',' << csv::format_double(quantile(values, 0.025)) << ','
          << csv::format_double(quantile(values, 0.975));
      }
      f << '\n';
    }
  });
  art.summary(o.out, "predict: " + std::to_string(queries.size()) +
                         " queries -> " + o.out);
}

void write_metric_header(std::ostream& f) {
  f << "scenario,n,Q,seed,metric,value\n";
}

void write_metric_row(std::ostream& f, const std::string& scenario,
                      std::size_t n, int q, std::uint64_t seed,
                      Metric metric, double value) {
  f << scenario << ',' << n << ',' << q << ',' << seed << ','
    << to_string(metric) << ',' << csv::format_double(value) << '\n';
}

std::vector<Metric> parse_metrics(const std::string& text) {
  std::vector<Metric> out;
  for (const auto& name : split_names(text)) {
    if (name == "both") {
      out.push_back(Metric::kRmse);
      out.push_back(Metric::kMape);
    } else {
      out.push_back(parse_metric(name));
    }
  }
  if (out.empty()) throw InvalidArgument("no metric given");
  return out;
}

void cmd_evaluate(const Options& o, const Artifacts& art) {
  const BoostModel model = load_model(o.model);
  const RngStream root(*o.seed);
  const Scenario sc = make_scenario(o.scenario, root, o.rate, o.markov_a,
                                    o.markov_b, o.flip);
  if (model.schema != sc.covariate_names()) {
    throw DataError("model covariates do not match scenario " + sc.name());
  }
  auto metrics = parse_metrics(o.metrics);
  auto test = build_test_set(sc, o.n_test, o.oracle_sims, root);
  predict_test_set(model, sc.horizon, test);
  art.write(o.out, [&](std::ostream& f) {
    write_comment_lines(f, art.header());
    write_metric_header(f);
    for (Metric m : metrics) {
      write_metric_row(f, sc.name(), o.label_n, o.label_q, *o.seed, m,
                       score(test, m));
    }
  });
  art.summary(o.out, "evaluate: rmse=" +
                         csv::format_double(score(test, Metric::kRmse)) +
                         " on " + std::to_string(test.size()) +
                         " test points -> " + o.out);
}

void cmd_importance(const Options& o, const Artifacts& art) {
  const BoostModel model = load_model(o.model);
  const auto importance = gain_importance(model);
  art.write(o.out, [&](std::ostream& f) {
    write_importance_csv(f, model, importance, art.header());
  });
  std::size_t top = static_cast<std::size_t>(
      std::max_element(importance.begin(), importance.end()) -
      importance.begin());
  art.summary(o.out, "importance: top feature " +
                         feature_name(model.schema, top) + " -> " + o.out);
}

void cmd_pdp(const Options& o, const Artifacts& art) {
  const BoostModel model = load_model(o.model);
  const OccExpTable table = load_table(o.table);
  const std::size_t f = feature_index(model.schema, o.feature);
  const std::vector<double> grid = o.grid.empty()
                                       ? feature_grid(table, f, o.points)
                                       : parse_double_list(o.grid);
  const auto pdp = partial_dependence(model, table, f, grid, o.log_scale);
  art.write(o.out, [&](std::ostream& out) {
    write_pdp_csv(out, o.feature, pdp, art.header());
  });
  if (!o.rug_out.empty()) {
    art.write(o.rug_out, [&](std::ostream& out) {
      write_rug_csv(out, o.feature, pdp.rug, art.header());
    });
  }
  art.summary(o.out, "pdp: " + std::to_string(grid.size()) +
                         " grid points for " + o.feature + " -> " + o.out);
}

void cmd_marginal(const Options& o, const Artifacts& art) {
  const BoostModel model = load_model(o.model);
  const OccExpTable table = load_table(o.table);
  const std::size_t f = feature_index(model.schema, o.feature);
  const auto bins = marginal_plot(model, table, f, o.bins, o.log_scale);
  art.write(o.out, [&](std::ostream& out) {
    write_marginal_csv(out, o.feature, bins, art.header());
  });
  art.summary(o.out, "marginal: " + std::to_string(bins.size()) +
                         " bins for " + o.feature + " -> " + o.out);
}

void cmd_replicate(const Options& o, const Artifacts& art) {
  const auto ns = parse_uint_list(o.n_list);
  const auto qs = parse_uint_list(o.q_list);
  const auto seeds = parse_uint_list(o.seed_list);
  const auto metrics = parse_metrics(o.metrics);
  const Scenario probe = make_scenario(o.scenario, RngStream(0));
  const BoostParams params = o.boost.apply(study_params(probe.kind));

  std::map<std::uint64_t, std::vector<TestPoint>> tests;
  for (std::uint64_t seed : seeds) {
    if (tests.count(seed)) continue;
    const RngStream root(seed);
    tests[seed] = build_test_set(make_scenario(o.scenario, root), o.n_test,
                                 o.oracle_sims, root);
  }

  std::ostringstream body;
  std::size_t rows = 0;
  for (std::uint64_t n : ns) {
    for (std::uint64_t q : qs) {
      for (std::uint64_t seed : seeds) {
        StudySettings settings;
        settings.scenario = o.scenario;
        settings.n = n;
        settings.Q = static_cast<int>(q);
        settings.seed = seed;
        settings.test_size = o.n_test;
        settings.oracle_sims = o.oracle_sims;
        settings.t_step = o.study_t_step;
        settings.s_step = o.scheme.s_step;
        settings.cv_folds = o.folds;
        settings.max_rounds = o.max_rounds;
        settings.params = params;
        const StudyResult r = run_study_cell(settings, tests[seed]);
        for (Metric m : metrics) {
          write_metric_row(body, probe.name(), n, settings.Q, seed, m,
                           m == Metric::kRmse ? r.rmse : r.mape);
          ++rows;
        }
        spdlog::info("replicate-study n={} Q={} seed={}: rmse={} nrounds={}",
                     n, q, seed, r.rmse, r.nrounds);
      }
    }
  }
  art.write(o.out, [&](std::ostream& f) {
    write_comment_lines(f, art.header());
    write_metric_header(f);
    f << body.str();
  });
  art.summary(o.out, "replicate-study: " + std::to_string(rows) +
                         " metric rows -> " + o.out);
}

// Name=value pairs of a subcommand's options, for the config hash. Output
// destinations are left out so that moving an artifact keeps its hash.
std::string effective_config(const CLI::App* sub) {
  static const std::set<std::string> kSkipped = {"help", "out", "rug-out",
                                                 "dict"};
  std::vector<std::string> items;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (kSkipped.contains(name)) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += r + ";";
    } else {
      value = opt->get_default_str();
    }
    items.push_back(name + "=" + value);
  }
  std::sort(items.begin(), items.end());
  std::string joined = sub->get_name();
  for (const auto& i : items) joined += "\n" + i;
  return joined;
}

void add_env_names(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") {
      continue;
    }
    std::string env = "LMBOOST_" + opt->get_lnames().front();
    for (char& c : env) {
      c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    opt->envname(env);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("lmboost", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct Restore {
    std::shared_ptr<spdlog::logger> logger;
    ~Restore() { spdlog::set_default_logger(logger); }
  } restore{previous};

  Options o;
  CLI::App app{"Landmark boosting: future conditional hazards from "
               "occurrence/exposure tables"};
  app.name("lmboost");
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value config file with [command] sections");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  app.add_flag("--verbose", o.verbose, "Log progress");
  add_env_names(&app);

  auto seed_option = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--seed", o.seed, "RNG seed");
    if (required) opt->required();
  };
  auto scenario_options = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "1, 2, 3, constant or markov");
    sub->add_option("--rate", o.rate, "Hazard of the constant scenario");
    sub->add_option("--markov-a", o.markov_a, "Markov baseline hazard a");
    sub->add_option("--markov-b", o.markov_b, "Markov hazard increment b");
    sub->add_option("--flip", o.flip, "Markov covariate flip rate");
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate a cohort");
  scenario_options(simulate);
  simulate->add_option("--n", o.n, "Number of subjects");
  seed_option(simulate, true);
  simulate->add_option("--out", o.out, "Output CSV ('-' = stdout)");

  auto* landmark = app.add_subcommand("landmark", "Build the super-dataset");
  o.data.add(landmark, true);
  o.scheme.add(landmark);
  landmark->add_flag("--no-collapse", o.no_collapse,
                     "Keep one row per subject, landmark and time bin");
  seed_option(landmark, true);
  landmark->add_option("--out", o.out, "Output table CSV");

  auto* fit = app.add_subcommand("fit", "Fit a boosted model");
  fit->add_option("--table", o.table, "Occurrence/exposure table")->required();
  o.boost.add(fit);
  fit->add_option("--cv-folds", o.cv_folds, "Select nrounds by K-fold CV (0 = off)");
  fit->add_option("--max-rounds", o.max_rounds, "Largest nrounds tried by CV");
  seed_option(fit, true);
  fit->add_option("--out", o.out, "Output model file");

  auto* cv = app.add_subcommand("cv", "Cross-validate the number of trees");
  cv->add_option("--table", o.table, "Occurrence/exposure table")->required();
  o.boost.add(cv);
  cv->add_option("--folds", o.folds, "Number of folds");
  cv->add_option("--max-rounds", o.max_rounds, "Largest nrounds tried");
  seed_option(cv, true);
  cv->add_option("--out", o.out, "Output CSV");

  auto* predict = app.add_subcommand("predict", "Predict hazards and survival");
  predict->add_option("--model", o.model, "Model file")->required();
  predict->add_option("--queries", o.queries, "CSV with s,t and covariates")
      ->required();
  predict->add_option("--bootstrap", o.bootstrap,
                      "Subject-resampling refits for percentile bands");
  o.data.add(predict, false);
  o.scheme.add(predict);
  o.boost.add(predict);
  seed_option(predict, false);
  predict->add_option("--out", o.out, "Output CSV");

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a test set");
  evaluate->add_option("--model", o.model, "Model file")->required();
  scenario_options(evaluate);
  evaluate->add_option("--n-test", o.n_test, "Test points");
  evaluate->add_option("--oracle-sims", o.oracle_sims, "Monte Carlo oracle draws");
  evaluate->add_option("--n", o.label_n, "Training size label");
  evaluate->add_option("--Q", o.label_q, "Landmark count label");
  evaluate->add_option("--metric", o.metrics, "rmse, mape or both");
  seed_option(evaluate, true);
  evaluate->add_option("--out", o.out, "Output CSV");

  auto* pdp = app.add_subcommand("pdp", "Partial dependence of one feature");
  pdp->add_option("--model", o.model, "Model file")->required();
  pdp->add_option("--table", o.table, "Occurrence/exposure table")->required();
  pdp->add_option("--feature", o.feature, "t, s or a covariate")->required();
  pdp->add_option("--points", o.points, "Grid size over the observed range");
  pdp->add_option("--grid", o.grid, "Explicit comma-separated grid");
  pdp->add_flag("--log-scale", o.log_scale, "Average log-hazards");
  pdp->add_option("--rug-out", o.rug_out, "Rug CSV");
  pdp->add_option("--out", o.out, "Output CSV");

  auto* importance = app.add_subcommand("importance", "Gain importance");
  importance->add_option("--model", o.model, "Model file")->required();
  importance->add_option("--out", o.out, "Output CSV");

  auto* marginal = app.add_subcommand("marginal", "Binned mean predictions");
  marginal->add_option("--model", o.model, "Model file")->required();
  marginal->add_option("--table", o.table, "Occurrence/exposure table")
      ->required();
  marginal->add_option("--feature", o.feature, "t, s or a covariate")
      ->required();
  marginal->add_option("--bins", o.bins, "Number of equal-width bins");
  marginal->add_flag("--log-scale", o.log_scale, "Average log-hazards");
  marginal->add_option("--out", o.out, "Output CSV");

  auto* replicate = app.add_subcommand("replicate-study",
                                       "Simulation study over n, Q and seeds");
  replicate->add_option("--scenario", o.scenario, "1, 2, 3, constant or markov");
  replicate->add_option("--n", o.n_list, "Sample sizes, e.g. 500,2000")
      ->required();
  replicate->add_option("--Q", o.q_list, "Landmark counts, e.g. 1,10")
      ->required();
  replicate->add_option("--seeds", o.seed_list, "Seeds, e.g. 1..5")->required();
  replicate->add_option("--n-test", o.n_test, "Test points per seed");
  replicate->add_option("--oracle-sims", o.oracle_sims,
                        "Monte Carlo oracle draws");
  replicate->add_option("--folds", o.folds, "CV folds for nrounds");
  replicate->add_option("--max-rounds", o.max_rounds,
                        "Largest nrounds tried (0 = no CV)");
  replicate->add_option("--t-step", o.study_t_step, "Time grid step");
  replicate->add_option("--s-step", o.scheme.s_step,
                        "Landmark grid step (0 = raw)");
  replicate->add_option("--metric", o.metrics, "rmse, mape or both");
  o.boost.add(replicate);
  replicate->add_option("--out", o.out, "Output CSV");

  for (CLI::App* sub : app.get_subcommands({})) add_env_names(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (o.verbose) logger->set_level(spdlog::level::info);
  set_max_threads(o.threads);

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  Artifacts art(command, fnv1a(effective_config(sub)), o.seed, out, err);
  try {
    if (command == "simulate") cmd_simulate(o, art);
    else if (command == "landmark") cmd_landmark(o, art);
    else if (command == "fit") cmd_fit(o, art);
    else if (command == "cv") cmd_cv(o, art);
    else if (command == "predict") cmd_predict(o, art);
    else if (command == "evaluate") cmd_evaluate(o, art);
    else if (command == "pdp") cmd_pdp(o, art);
    else if (command == "importance") cmd_importance(o, art);
    else if (command == "marginal") cmd_marginal(o, art);
    else if (command == "replicate-study") cmd_replicate(o, art);
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DegenerateData& e) {
    err << "degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const EnvelopeViolation& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lmboost::cli
