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

#include <array>
#include <cstdint>
#include <limits>

namespace lmboost {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 64-bit key is the user seed; the upper 64 bits of the 128-bit counter
// select a stream and the lower 64 bits count blocks within it. Distinct
// (seed, stream) pairs give statistically independent sequences, so every
// subject, boosting round or Monte Carlo replicate can own a stream and the
// output does not depend on how work is scheduled across threads.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  // Raw block function. Exposed for known-answer tests.
  static Counter block(Counter counter, Key key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Counter buffer_{};
  int used_ = 4;
};

// Stable 64-bit mix of a parent stream id with a tag, used to derive
// hierarchical stream ids ("subject 17 of dataset 3", "round 40 of fit").
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t tag);

// A seed plus stream id; cheap to copy, produces engines on demand.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  RngStream child(std::uint64_t tag) const {
    return {seed_, derive_stream(stream_, tag)};
  }
  Philox4x32 engine() const { return {seed_, stream_}; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
};

// Stream tags used across modules. Kept in one place so that two modules
// never draw from the same substream by accident.
namespace stream_tag {
inline constexpr std::uint64_t kSubjects = 0x5355424a;     // "SUBJ"
inline constexpr std::uint64_t kNoiseFactor = 0x4e4f4953;  // "NOIS"
inline constexpr std::uint64_t kLandmarks = 0x4c4d4b53;    // "LMKS"
inline constexpr std::uint64_t kRounds = 0x524f5544;       // "ROUD"
inline constexpr std::uint64_t kFolds = 0x464f4c44;        // "FOLD"
inline constexpr std::uint64_t kTestSet = 0x54455354;      // "TEST"
inline constexpr std::uint64_t kOracle = 0x4f52434c;       // "ORCL"
inline constexpr std::uint64_t kBootstrap = 0x424f4f54;    // "BOOT"
}  // namespace stream_tag

// Uniform double in [0, 1) with 53 random bits.
double uniform01(Philox4x32& engine);

}  // namespace lmboost
