#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace spinbus {

/// Worker count for sweeps: SPINBUS_THREADS if set and positive, else the
/// hardware concurrency.
inline unsigned sweep_threads() {
    if (const char* env = std::getenv("SPINBUS_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {
inline thread_local bool in_parallel_region = false;
}

/// Runs body(k) for k in [0, count) over contiguous chunks. Callers write
/// into per-index slots and reduce serially afterwards, so results never
/// depend on the worker count.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned threads = sweep_threads()) {
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    // Nested sweeps run serially inside the outer workers.
    if (threads <= 1 || detail::in_parallel_region) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {  // workers join here
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        const std::size_t chunk = (count + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(count, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([lo, hi, &body, &failure, &failure_mutex] {
                detail::in_parallel_region = true;
                try {
                    for (std::size_t k = lo; k < hi; ++k) body(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace spinbus
