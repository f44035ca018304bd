#pragma once

#include <cstddef>
#include <functional>

namespace bresse {

/// Worker count: BRESSE_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once. If any calls throw, the exception from the
/// lowest index is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace bresse
