#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace peer {

/// Chunked parallel map over [0, n). Results must be written to
/// disjoint slots so the reduction stays deterministic.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (n == 0) return;
    unsigned hw = threads ? threads : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace peer
