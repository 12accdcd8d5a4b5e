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
#include <functional>

namespace lmboost {

// Process-wide cap on worker threads; 0 selects hardware concurrency.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Runs body(i) for i in [0, n) on up to max_threads() workers. Work items are
// claimed dynamically, so body must only write to per-index outputs; callers
// reduce those outputs in index order to stay independent of the thread
// count. Calls made from inside a body run serially on the calling worker.
// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lmboost
