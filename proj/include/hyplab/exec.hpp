#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace hyplab {

/// Execution knobs shared by the grid operators and the matrix assembly.
struct ExecConfig {
    int threads = 1;

    static ExecConfig hardware() {
        ExecConfig cfg;
        unsigned n = std::thread::hardware_concurrency();
        cfg.threads = n == 0 ? 1 : static_cast<int>(n);
        return cfg;
    }
};

/// Runs fn(begin, end) over a partition of [0, total). Chunks are disjoint,
/// so fn may write to per-index slots without synchronization.
template <typename Fn>
void parallel_for(std::size_t total, const ExecConfig& cfg, Fn&& fn) {
    int nt = cfg.threads;
    if (nt <= 1 || total < 2) {
        fn(std::size_t{0}, total);
        return;
    }
    if (static_cast<std::size_t>(nt) > total) nt = static_cast<int>(total);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (total + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(total, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace hyplab
