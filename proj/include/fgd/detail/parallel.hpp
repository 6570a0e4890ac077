#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace fgd::detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Run fn(thread_id, begin, end) over a contiguous range split into chunks.
template <typename Fn>
void parallel_chunks(int n_items, int threads, Fn&& fn) {
    int T = std::min(resolve_threads(threads), std::max(1, n_items));
    if (T <= 1 || n_items <= 1) {
        fn(0, 0, n_items);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(T - 1));
    auto range = [&](int t) {
        const int b = static_cast<int>(static_cast<std::int64_t>(n_items) * t / T);
        const int e = static_cast<int>(static_cast<std::int64_t>(n_items) * (t + 1) / T);
        return std::pair<int, int>{b, e};
    };
    for (int t = 1; t < T; ++t)
        pool.emplace_back([&, t] {
            auto [b, e] = range(t);
            fn(t, b, e);
        });
    auto [b, e] = range(0);
    fn(0, b, e);
    for (auto& th : pool) th.join();
}

// Slice-parallel scan with two per-thread integer accumulators; the caller
// merges the parts in index order so results do not depend on thread count.
template <typename Fn>
void parallel_slices(int slices, int threads, std::vector<std::uint64_t>& a_parts,
                     std::vector<std::uint64_t>& b_parts, Fn&& fn) {
    const int T = std::min(resolve_threads(threads), std::max(1, slices));
    a_parts.assign(static_cast<std::size_t>(T), 0);
    b_parts.assign(static_cast<std::size_t>(T), 0);
    parallel_chunks(slices, T, [&](int t, int b, int e) {
        for (int s = b; s < e; ++s)
            fn(s, a_parts[static_cast<std::size_t>(t)], b_parts[static_cast<std::size_t>(t)]);
    });
}

// Run a fixed small set of independent tasks (one per index).
template <typename Fn>
void run_tasks(int n_tasks, int threads, Fn&& fn) {
    parallel_chunks(n_tasks, threads, [&](int, int b, int e) {
        for (int i = b; i < e; ++i) fn(i);
    });
}

}  // namespace fgd::detail
