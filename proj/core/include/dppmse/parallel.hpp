#pragma once

#include <cstddef>
#include <functional>

namespace dppmse {

/// Number of worker threads a request maps to (0 = hardware concurrency).
unsigned effective_threads(unsigned requested);

/// Runs body(i) for i in [0, count) across up to `threads` workers.
///
/// Work items must be independent and write only to their own output slot;
/// under that contract results are identical for any thread count, including
/// sequential execution. Nested calls run inline on the calling worker.
/// The first exception thrown by a work item is rethrown on the caller.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)> &body);

}  // namespace dppmse
