#pragma once

#include <cstddef>
#include <functional>

namespace lilbound {

/// Worker count to use: `requested` if nonzero, else LILBOUND_THREADS if set
/// and nonzero, else the hardware concurrency. Always at least 1.
unsigned resolve_workers(unsigned requested);

/// Runs body(begin, end) over [0, count) split into contiguous chunks, one
/// per worker. Chunk boundaries depend only on count and the worker count;
/// callers that write results by index get scheduling-independent output.
/// The first exception thrown by any chunk is rethrown after all join.
void parallel_for_chunks(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace lilbound
