#pragma once

#include <cstddef>
#include <functional>

namespace tap {

// Number of hardware threads, at least 1.
unsigned default_workers();

// Splits [0, count) into one contiguous chunk per worker and runs
// fn(chunk_index, begin, end) concurrently. Chunk boundaries depend only on
// (count, workers), so any chunk-indexed accumulation is reproducible.
// The first thrown exception is rethrown on the calling thread.
void parallel_chunks(std::size_t count, unsigned workers,
                     const std::function<void(unsigned, std::size_t, std::size_t)> &fn);

} // namespace tap
