// Copyright 2026 The djf Authors
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

#ifndef DJF_CORE_PARALLEL_HPP
#define DJF_CORE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace djf {

/// Hardware concurrency with a sane floor.
inline int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Resolves a user-facing thread-count request: 0 means "hardware default".
inline int resolve_threads(int requested) {
    return requested <= 0 ? hardware_threads() : requested;
}

/// Number of workers parallel_blocks_ws will use for a given request.
inline int parallel_workers(std::size_t num_blocks, int threads) {
    threads = resolve_threads(threads);
    if (threads <= 1 || num_blocks <= 1) return 1;
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), num_blocks));
}

/// Runs fn(block, worker) for every block in [0, num_blocks) on up to
/// `threads` workers; `worker` identifies the executing worker slot so
/// callers can hand out per-worker scratch. Blocks must write disjoint
/// state; the block decomposition is independent of the worker count, so
/// results do not depend on `threads`.
inline void parallel_blocks_ws(std::size_t num_blocks, int threads,
                               const std::function<void(std::size_t, int)>& fn) {
    const int workers = parallel_workers(num_blocks, threads);
    if (workers <= 1) {
        for (std::size_t b = 0; b < num_blocks; ++b) fn(b, 0);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto run = [&](int worker) {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= num_blocks || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(b, worker);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(run, t);
    run(0);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline void parallel_blocks(std::size_t num_blocks, int threads,
                            const std::function<void(std::size_t)>& fn) {
    parallel_blocks_ws(num_blocks, threads, [&](std::size_t b, int) { fn(b); });
}

}  // namespace djf

#endif  // DJF_CORE_PARALLEL_HPP
