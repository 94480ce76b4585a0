#pragma once

#include <cstddef>
#include <functional>

namespace ancova_cp {

/// ANCOVA_CP_THREADS if set to a positive integer, else the hardware concurrency.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// The first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace ancova_cp
