#pragma once

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace esnx {

// Worker bound: ESNX_THREADS, 0 or unset = hardware concurrency.
inline int thread_count() {
    static const int n = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("ESNX_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) return static_cast<int>(v);
        }
        return hw;
    }();
    return n;
}

// Static block partition of [0,n). Results must be written to per-index slots so the
// outcome is independent of scheduling; f receives the global index.
template <class F>
void parallel_for(std::int64_t n, F&& f) {
    const int workers = thread_count();
    if (n <= 0) return;
    if (workers <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) f(i);
        return;
    }
    const int used = static_cast<int>(workers < n ? workers : n);
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (int w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            const std::int64_t lo = n * w / used;
            const std::int64_t hi = n * (w + 1) / used;
            for (std::int64_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace esnx
