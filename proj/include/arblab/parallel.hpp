#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace arblab {

// Thread count for path ensembles: ARBLAB_THREADS if set, else the hardware
// concurrency, clamped to [1, 64].
inline int ensemble_threads() {
    if (const char* env = std::getenv("ARBLAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(std::min(v, 64L));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
}

// Runs fn(i) for i in [0, n). Each index writes only to its own slot of any
// output buffer, so the result is identical to the sequential order; callers
// do all reductions sequentially afterwards.
inline void parallel_for_index(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    const int threads = std::min<std::int64_t>(ensemble_threads(), n > 0 ? n : 1);
    if (threads <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::int64_t i = t; i < n; i += threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace arblab
