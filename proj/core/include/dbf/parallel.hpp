#pragma once

#include <cstddef>
#include <functional>

namespace dbf {

/// Worker count from the THREADS environment variable, falling back to the
/// hardware concurrency (at least 1).
std::size_t thread_count_from_env();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work items must
/// write only to their own slots; the first exception is rethrown after join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace dbf
