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

#include <stdexcept>
#include <string>

namespace lmboost {

// Root of the library's exception hierarchy. The CLI maps each subclass to
// an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// A coordinate outside the partition's domain.
class OutOfDomain : public DataError {
 public:
  OutOfDomain(std::size_t dimension, double value);

  std::size_t dimension() const { return dimension_; }

 private:
  std::size_t dimension_;
};

// Data that leaves the estimator undefined, e.g. no occurrences.
class DegenerateData : public Error {
 public:
  using Error::Error;
};

// The thinning majorant was exceeded by the hazard at a proposal.
class EnvelopeViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace lmboost
