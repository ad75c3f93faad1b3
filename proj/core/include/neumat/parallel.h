// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_PARALLEL_H
#define NEUMAT_PARALLEL_H

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace neumat {

inline int resolve_threads(int requested) {
    if (requested > 0)
        return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(worker, begin, end) over contiguous chunks of [0, count).
// Each worker owns exactly one chunk, chunks are assigned in index order, so
// any per-worker accumulation merged in worker order is independent of
// scheduling.
template <typename Fn>
void parallel_chunks(int64_t count, int threads, Fn &&fn) {
    threads = resolve_threads(threads);
    if (count <= 0)
        return;
    if (threads > count)
        threads = static_cast<int>(count);
    if (threads <= 1) {
        fn(0, int64_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    int64_t chunk = (count + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        int64_t begin = w * chunk;
        int64_t end = begin + chunk < count ? begin + chunk : count;
        if (begin >= end)
            break;
        pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
    }
    for (auto &t : pool)
        t.join();
}

}  // namespace neumat

#endif  // NEUMAT_PARALLEL_H
