#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "foamlab/rng.hpp"

namespace foamlab {

/// Samples per substream. Fixed so that results never depend on the worker count.
inline constexpr std::uint64_t kChunkSize = 512;

/// Runs `body(rng, begin, end)` over [0, n_samples) in fixed-size chunks.
/// Chunk c draws from Rng(seed, c); partial accumulators are merged in chunk
/// order, so floating-point sums are bit-identical for every `workers` value.
template <class Acc, class Body>
Acc run_chunked(std::uint64_t n_samples, std::uint64_t seed, unsigned workers, Body&& body)
{
    const std::uint64_t n_chunks = (n_samples + kChunkSize - 1) / kChunkSize;
    std::vector<Acc> partial(n_chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks)
                return;
            try {
                Rng rng(seed, c);
                const std::uint64_t begin = c * kChunkSize;
                const std::uint64_t end = std::min(n_samples, begin + kChunkSize);
                partial[c] = body(rng, begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(n_chunks);
                return;
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    Acc total{};
    for (auto& p : partial)
        total += p;
    return total;
}

} // namespace foamlab
