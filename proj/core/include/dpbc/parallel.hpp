#pragma once

#include <functional>

namespace dpbc {

/// Worker count: DPBC_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Runs body(i) for i in [0, n) over up to thread_count() threads. Work is
/// split into contiguous chunks; the first exception thrown is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace dpbc
