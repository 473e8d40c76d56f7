#pragma once

// Index-parallel helper for the embarrassingly parallel scans.  Results are
// merged by index, so the outcome is independent of the scheduling; the
// BH_THREADS environment variable caps the worker count.

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bettilab {

inline unsigned max_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("BH_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
    }
    return hw;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::min<std::size_t>(max_threads(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace bettilab
