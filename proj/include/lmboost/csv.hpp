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

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lmboost::csv {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Strict parse of a whole field; nullopt when the text is not a number.
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

// Splits one CSV line. Double-quoted fields may contain commas and "" for a
// literal quote.
std::vector<std::string> split_line(std::string_view line);

// Reads records from a stream, collecting leading '#' comment lines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-comment record; false at end of input.
  bool next(std::vector<std::string>& fields);

  // 1-based line number of the record last returned.
  std::size_t line_number() const { return line_number_; }
  const std::vector<std::string>& comments() const { return comments_; }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
  std::vector<std::string> comments_;
};

// Quotes a field when it contains a comma, quote or newline.
std::string quote(std::string_view field);

}  // namespace lmboost::csv
