#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace heatmv {

/// Worker threads used by parallel_for: HEATMV_THREADS if set, else hardware concurrency.
[[nodiscard]] std::size_t worker_count();

/// Calls f(i) for i in [0, count) across worker_count() threads. Static interleaved
/// partition; callers write results by index so output never depends on scheduling.
/// The first exception thrown by any f is rethrown after all workers join.
template <class F>
void parallel_for(std::size_t count, F&& f) {
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// splitmix64 mix of (seed, stream): independent per-shard seeds.
[[nodiscard]] constexpr std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace heatmv
