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

#include "iiv/parallel.hpp"

#include <atomic>

namespace iiv
{

namespace
{
std::atomic<unsigned> g_thread_count{1};
}

unsigned thread_count() noexcept { return g_thread_count.load(std::memory_order_relaxed); }

void set_thread_count(unsigned count) noexcept
{
  g_thread_count.store(count == 0 ? 1 : count, std::memory_order_relaxed);
}

}  // namespace iiv
