#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace kitwpa {

// Evaluates fn(i) for i in [0, n) on a small worker pool and stores the result
// in slot i. Output order never depends on scheduling. The first exception
// (lowest index) is rethrown after all workers join.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, Fn&& fn) {
    std::vector<Result> out(n);
    if (n == 0) return out;

    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, (n + 63) / 64);

    std::vector<std::exception_ptr> errors(n);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (workers <= 1) {
        run_range(0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace kitwpa
