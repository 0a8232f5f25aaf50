#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace pairtime {

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, n). Each index is claimed by exactly one worker;
// callers keep results deterministic by writing only into slot i.
template <typename F>
void parallel_for_index(std::size_t n, int workers, F&& fn) {
    const int nw = resolve_workers(workers);
    if (n == 0) return;
    if (nw <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(nw), n);
    pool.reserve(spawn);
    for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

}  // namespace pairtime
