#pragma once

#include <cstdint>
#include <functional>

namespace spectral_embed {

/// Worker count: SPECTRAL_EMBED_THREADS if set (>= 1), else hardware concurrency.
int thread_count();

/// Runs body(begin, end) over disjoint chunks of [0, count). Chunk boundaries
/// depend only on `count` and the thread count, and callers write results
/// into per-index slots, so reductions done afterwards are deterministic.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace spectral_embed
