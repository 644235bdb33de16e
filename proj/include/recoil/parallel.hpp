#pragma once

// Deterministic data-parallel loop: index i always lands in the same static
// chunk, and each task writes only its own output slot.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "recoil/errors.hpp"

namespace recoil {

inline constexpr const char* threads_env_var = "RECOIL_LADDER_THREADS";

/// Worker count from RECOIL_LADDER_THREADS, else the hardware concurrency.
inline int default_worker_count() {
    if (const char* env = std::getenv(threads_env_var)) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string(threads_env_var) + " must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, count) on `workers` threads, contiguous static
/// chunks. The first exception (lowest chunk) is rethrown after all joins.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    if (workers < 1) throw ConfigError("worker count must be positive");
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(count, 1));
    if (w <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> pool;
    pool.reserve(w);
    const std::size_t base = count / w, extra = count % w;
    std::size_t begin = 0;
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t end = begin + base + (t < extra ? 1 : 0);
        pool.emplace_back([&, t, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace recoil
