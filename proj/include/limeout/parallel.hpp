#pragma once

#include <cstddef>
#include <functional>

namespace limeout {

// Runs fn(i) for i in [0, n) across a small thread pool. Results must be
// written to disjoint, preallocated slots; any shared reduction belongs in a
// sequential pass afterwards. Nested calls degrade to serial execution, so
// callers can parallelize at whatever level suits them without
// oversubscribing.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace limeout
