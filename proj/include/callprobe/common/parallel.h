/*
 * Copyright 2026 The callprobe Authors.
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

#ifndef CALLPROBE_COMMON_PARALLEL_H_
#define CALLPROBE_COMMON_PARALLEL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>

namespace callprobe {

// Runs fn(0) .. fn(n-1) on up to `threads` worker threads. Jobs are handed
// out in index order; callers store results by index so the outcome does not
// depend on scheduling. If any job throws, the exception of the lowest
// failing index is rethrown after all workers finish.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn);

// Mixes a base seed with a list of integer tags (splitmix64 steps), giving
// independent streams for e.g. (outer turn, grid point, inner turn).
std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> tags);

}  // namespace callprobe

#endif  // CALLPROBE_COMMON_PARALLEL_H_
