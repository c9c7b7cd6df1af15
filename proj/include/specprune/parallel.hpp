#pragma once

#include <cstddef>
#include <functional>

namespace specprune {

/// Worker count: SPECPRUNE_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
std::size_t default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work items
/// must write to disjoint outputs; the first exception thrown is rethrown
/// after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)> &body);

} // namespace specprune
