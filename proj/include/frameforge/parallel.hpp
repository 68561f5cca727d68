#pragma once

#include <functional>

namespace frameforge {

// Worker count from FRAMEFORGE_THREADS (default 1).
int thread_count();

// Calls body(i) for i in [0, n). Chunks are contiguous so callers can
// reduce per-index results in index order for deterministic output.
void parallel_for(long long n, const std::function<void(long long)>& body);

}  // namespace frameforge
