// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace rmiso {

/// Worker count: RMISO_THREADS when set, otherwise the hardware concurrency.
inline int default_thread_count() {
    if (const char* env = std::getenv("RMISO_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs f(i) for i in [0, n) on a static block partition. Tasks must write
/// to disjoint slots; results are then independent of the thread count.
template <typename F>
void parallel_for(std::size_t n, F&& f, int threads = 0) {
    if (threads <= 0) threads = default_thread_count();
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t lo = n * t / workers;
            const std::size_t hi = n * (t + 1) / workers;
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace rmiso
