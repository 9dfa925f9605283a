#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace torustau {

/* worker count: hardware concurrency, capped by TORUSTAU_THREADS */
std::size_t worker_count();

/*
 * Run body(i) for i in [0, n). Indices are dealt out in fixed contiguous
 * blocks, so any result written to slot i is independent of the thread
 * count; callers fold the slots in index order afterwards.
 */
template<typename F>
void parallel_for(std::size_t n, F&& body)
{
    std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; i++)
            body(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; w++) {
        std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; i++)
                    body(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(error_lock);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace torustau
