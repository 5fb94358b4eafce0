#ifndef SPINDEX_PARALLEL_HPP
#define SPINDEX_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace spindex {

/// Worker count: SPINDEX_THREADS if set, else the hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("SPINDEX_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n) across threads in contiguous blocks.  Callers
/// write results into preallocated per-index slots, so the reduction order
/// stays deterministic.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace spindex

#endif
