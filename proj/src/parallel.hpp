#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace orbitclt::detail {

inline unsigned resolve_workers(unsigned workers)
{
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    return workers;
}

/// Calls fn(task) for every task in [0, tasks) on up to `workers` threads.
/// Callers write results into per-task slots and reduce in task order, so
/// results never depend on scheduling.
template <class Fn>
void parallel_tasks(std::size_t tasks, unsigned workers, Fn&& fn)
{
    workers = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), tasks));
    if (workers <= 1) {
        for (std::size_t t = 0; t < tasks; ++t)
            fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
                try {
                    fn(t);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = tasks;
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

inline constexpr std::size_t kChunk = 512;

inline std::size_t chunk_count(std::size_t items) { return (items + kChunk - 1) / kChunk; }

} // namespace orbitclt::detail
