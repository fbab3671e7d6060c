#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace occlusion {

inline unsigned default_worker_count() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

// Runs fn(i) for i in [0, n) on up to `workers` threads. Tasks are claimed
// from a shared counter; the first exception thrown by any task is
// rethrown after all workers have joined.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (n == 0) return;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(n, 1u << 16))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace occlusion
