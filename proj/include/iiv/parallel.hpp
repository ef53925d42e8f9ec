// Copyright 2026 The iiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IIV__PARALLEL_HPP_
#define IIV__PARALLEL_HPP_

#include <algorithm>
#include <thread>
#include <vector>

#include "iiv/image.hpp"

namespace iiv
{

/// Worker threads used by the per-pixel stages. Defaults to 1.
unsigned thread_count() noexcept;
void set_thread_count(unsigned count) noexcept;

/// Calls body(begin, end) over disjoint contiguous ranges covering [0, n).
///
/// Only for element-wise work: each index must be written by exactly one
/// range, so the result does not depend on the partitioning.
template <typename Body>
void parallel_for(Index n, Body && body, Index min_chunk = 4096)
{
  const Index workers =
    std::min<Index>(thread_count(), std::max<Index>(1, n / std::max<Index>(1, min_chunk)));
  if (workers <= 1) {
    body(Index{0}, n);
    return;
  }
  const Index chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<size_t>(workers - 1));
  for (Index w = 1; w < workers; ++w) {
    const Index begin = std::min(n, w * chunk);
    const Index end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(Index{0}, std::min(n, chunk));
}

}  // namespace iiv

#endif  // IIV__PARALLEL_HPP_
