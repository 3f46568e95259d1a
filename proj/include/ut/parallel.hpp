#pragma once

#include <cstddef>
#include <functional>

namespace ut {

/// Number of worker threads to use when the caller passes 0.
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = all
/// hardware threads). Each index runs exactly once; the first exception thrown
/// by any task is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace ut
