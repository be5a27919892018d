#pragma once

#include <cstdint>
#include <functional>

namespace cascade {

// Worker cap: CASCADE_THREADS env var if set (>=1), else hardware concurrency.
int max_threads();

// Runs fn(chunk) for chunk = 0..n_chunks-1 on up to max_threads() workers.
// The chunk decomposition is fixed by the caller and never depends on the
// worker count, so chunk outputs (written to disjoint slots) and chunk-ordered
// reductions are bit-identical for any thread count.
void parallel_chunks(std::uint64_t n_chunks, const std::function<void(std::uint64_t)>& fn);

}  // namespace cascade
