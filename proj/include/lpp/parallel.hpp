#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lpp {

// Splits [0, n) into exactly `workers` contiguous chunks (some possibly empty)
// and runs fn(worker, begin, end) for each. Chunk boundaries depend only on
// (n, workers), so merging per-worker partials in worker order gives
// reproducible results for a fixed worker count.
inline void parallel_chunks(std::size_t n, int workers,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
    if (workers <= 1) {
        fn(0, 0, n);
        return;
    }
    const std::size_t w = static_cast<std::size_t>(workers);
    const std::size_t chunk = n / w;
    const std::size_t rem = n % w;
    std::vector<std::thread> threads;
    threads.reserve(w);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < w; ++i) {
        const std::size_t len = chunk + (i < rem ? 1 : 0);
        threads.emplace_back([&, i, begin, len] {
            try {
                fn(static_cast<int>(i), begin, begin + len);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
        begin += len;
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lpp
