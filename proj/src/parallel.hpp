#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace conewalk {

/// Number of worker threads to use: `requested` if positive, otherwise the
/// hardware concurrency (at least 1).
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Fixed chunk width for sample partitioning. The chunk layout depends only
/// on the sample count, never on the thread count, so per-chunk partial
/// results and their fixed-order reduction are machine-independent.
inline constexpr int64_t kChunkSize = 16384;

/// Runs body(chunk_id, begin, end, acc[chunk_id]) over [0, n) split into
/// fixed chunks, work-stealing across `threads` workers. The caller reduces
/// `acc` in chunk order afterwards; that order is what makes results
/// bit-identical across thread counts.
template <class Acc, class Body>
std::vector<Acc> map_chunks(int64_t n, int threads, Body&& body) {
    const int64_t n_chunks = n > 0 ? (n + kChunkSize - 1) / kChunkSize : 0;
    std::vector<Acc> acc(static_cast<size_t>(n_chunks));
    if (n_chunks == 0) return acc;

    threads = resolve_threads(threads);
    if (threads > n_chunks) threads = static_cast<int>(n_chunks);

    std::atomic<int64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            int64_t id = next.fetch_add(1, std::memory_order_relaxed);
            if (id >= n_chunks) return;
            int64_t begin = id * kChunkSize;
            int64_t end = std::min(begin + kChunkSize, n);
            body(id, begin, end, acc[static_cast<size_t>(id)]);
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return acc;
}

}  // namespace conewalk
