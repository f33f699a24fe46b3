#pragma once

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace plumbline {

/// Worker cap: explicit request > PLUMBLINE_THREADS > hardware concurrency.
inline int resolve_thread_count(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PLUMBLINE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [begin, end) across up to `threads` workers.
/// Indices are partitioned into contiguous blocks, so results written to
/// disjoint per-index slots are independent of the worker count.
template <typename Fn>
void parallel_for(long begin, long end, int threads, Fn&& fn) {
    const long n = end - begin;
    if (n <= 0) return;
    threads = resolve_thread_count(threads);
    if (threads <= 1 || n == 1) {
        for (long i = begin; i < end; ++i) fn(i);
        return;
    }
    if (threads > n) threads = static_cast<int>(n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = begin + t * chunk;
        const long hi = lo + chunk < end ? lo + chunk : end;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// splitmix64 finalizer; used to derive independent seed streams.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace plumbline
