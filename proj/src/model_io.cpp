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

#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lmboost/boost.hpp"
#include "lmboost/csv.hpp"
#include "lmboost/error.hpp"

// Layout:
//   # free comment lines
//   lmboost-model 1
//   p <p>
//   feature <name>                 (p lines)
//   cap <lo> <hi>
//   base_score <value>
//   mode newton|gradient
//   partition <dim> raw|<split> ...  (p + 2 lines)
//   trees <count>
//   tree <eta>
//   S <feature> <threshold> L|R <gain>   preorder, then
//   L <value>

namespace lmboost {
namespace {

constexpr int kFormatVersion = 1;

std::string fmt(double v) { return csv::format_double(v); }

class LineSource {
 public:
  explicit LineSource(std::istream& in) : in_(in) {}

  // Next non-comment line split into whitespace tokens.
  std::vector<std::string> next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      last_ = line;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      return tokens;
    }
    throw DataError(std::string("model file ended before ") + what);
  }

  const std::string& last_line() const { return last_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw DataError("model line " + std::to_string(line_number_) + ": " +
                    message);
  }

  double number(const std::string& text) const {
    const auto v = csv::parse_double(text);
    if (!v) fail("expected a number, got '" + text + "'");
    return *v;
  }

  std::size_t count(const std::string& text) const {
    const auto v = csv::parse_int(text);
    if (!v || *v < 0) fail("expected a count, got '" + text + "'");
    return static_cast<std::size_t>(*v);
  }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
  std::string last_;
};

void write_node(std::ostream& out, const std::vector<TreeNode>& nodes,
                std::size_t i) {
  const TreeNode& node = nodes[i];
  if (node.is_leaf) {
    out << "L " << fmt(node.value) << '\n';
    return;
  }
  out << "S " << node.feature << ' ' << fmt(node.threshold) << ' '
      << (node.default_left ? 'L' : 'R') << ' ' << fmt(node.gain) << '\n';
  write_node(out, nodes, node.left);
  write_node(out, nodes, node.right);
}

std::size_t read_node(LineSource& src, std::vector<TreeNode>& nodes,
                      std::size_t num_features, int depth) {
  if (depth > 64) src.fail("tree deeper than 64 levels");
  auto tokens = src.next("a tree node");
  const std::size_t index = nodes.size();
  nodes.emplace_back();
  if (tokens.size() == 2 && tokens[0] == "L") {
    nodes[index].value = src.number(tokens[1]);
    return index;
  }
  if (tokens.size() != 5 || tokens[0] != "S" ||
      (tokens[3] != "L" && tokens[3] != "R")) {
    src.fail("expected 'S <feature> <threshold> L|R <gain>' or 'L <value>'");
  }
  TreeNode split;
  split.is_leaf = false;
  split.feature = src.count(tokens[1]);
  if (split.feature >= num_features) src.fail("split feature out of range");
  split.threshold = src.number(tokens[2]);
  split.default_left = tokens[3] == "L";
  split.gain = src.number(tokens[4]);
  split.left = read_node(src, nodes, num_features, depth + 1);
  split.right = read_node(src, nodes, num_features, depth + 1);
  nodes[index] = split;
  return index;
}

}  // namespace

void write_model(std::ostream& out, const BoostModel& model,
                 const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "lmboost-model " << kFormatVersion << '\n';
  out << "p " << model.schema.size() << '\n';
  for (const auto& name : model.schema) {
    if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
      throw InvalidArgument("covariate name '" + name +
                            "' cannot be stored in a model file");
    }
    out << "feature " << name << '\n';
  }
  out << "cap " << fmt(model.cap.log_lambda_lo) << ' '
      << fmt(model.cap.log_lambda_hi) << '\n';
  out << "base_score " << fmt(model.base_score) << '\n';
  out << "mode " << to_string(model.mode) << '\n';
  for (std::size_t d = 0; d < model.partition.dims(); ++d) {
    out << "partition " << d;
    if (model.partition.is_raw(d)) {
      out << " raw";
    } else {
      for (double b : model.partition.splits(d)) out << ' ' << fmt(b);
    }
    out << '\n';
  }
  out << "trees " << model.trees.size() << '\n';
  for (const auto& t : model.trees) {
    out << "tree " << fmt(t.eta) << '\n';
    write_node(out, t.tree.nodes(), 0);
  }
}

BoostModel read_model(std::istream& in) {
  LineSource src(in);
  BoostModel model;

  auto tokens = src.next("the header");
  if (tokens.size() != 2 || tokens[0] != "lmboost-model") {
    src.fail("not an lmboost model file");
  }
  if (src.count(tokens[1]) != kFormatVersion) {
    src.fail("unsupported model format version " + tokens[1]);
  }

  auto expect = [&](const char* key, std::size_t n) {
    auto t = src.next(key);
    if (t.empty() || t[0] != key || t.size() != n + 1) {
      src.fail(std::string("expected '") + key + "' with " +
               std::to_string(n) + " value(s)");
    }
    return t;
  };

  const std::size_t p = src.count(expect("p", 1)[1]);
  for (std::size_t j = 0; j < p; ++j) {
    model.schema.push_back(expect("feature", 1)[1]);
  }
  auto cap = expect("cap", 2);
  model.cap.log_lambda_lo = src.number(cap[1]);
  model.cap.log_lambda_hi = src.number(cap[2]);
  try {
    model.cap.validate();
  } catch (const InvalidArgument& e) {
    src.fail(e.what());
  }
  model.base_score = src.number(expect("base_score", 1)[1]);
  try {
    model.mode = parse_boost_mode(expect("mode", 1)[1]);
  } catch (const InvalidArgument& e) {
    src.fail(e.what());
  }

  std::vector<std::vector<double>> splits(p + 2);
  for (std::size_t d = 0; d < p + 2; ++d) {
    auto t = src.next("the partition");
    if (t.size() < 3 || t[0] != "partition" || src.count(t[1]) != d) {
      src.fail("expected 'partition " + std::to_string(d) + " ...'");
    }
    if (t.size() == 3 && t[2] == "raw") continue;
    for (std::size_t k = 2; k < t.size(); ++k) {
      splits[d].push_back(src.number(t[k]));
    }
  }
  try {
    model.partition = Partition(std::move(splits));
  } catch (const InvalidArgument& e) {
    src.fail(e.what());
  }

  const std::size_t num_trees = src.count(expect("trees", 1)[1]);
  model.trees.reserve(num_trees);
  for (std::size_t j = 0; j < num_trees; ++j) {
    BoostedTree bt;
    bt.eta = src.number(expect("tree", 1)[1]);
    std::vector<TreeNode> nodes;
    read_node(src, nodes, p + 2, 0);
    bt.tree = Tree(std::move(nodes));
    model.trees.push_back(std::move(bt));
  }
  return model;
}

}  // namespace lmboost
