/*
 * Copyright 2026 The RethinkNet Authors.
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

#ifndef RETHINK_PARALLEL_HPP_
#define RETHINK_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace rethink {

/// Worker count from RETHINK_THREADS, else the number of hardware threads
/// (at least 1).
std::size_t thread_budget();

/// Runs job(0..count-1) on up to `threads` workers. Jobs must be
/// independent. The first exception thrown by any job is rethrown after all
/// workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job);

}  // namespace rethink

#endif  // RETHINK_PARALLEL_HPP_
