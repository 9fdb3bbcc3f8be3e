#pragma once

#include <cstddef>
#include <functional>

namespace discflow {

/// Worker count: min(hardware_concurrency, NONLOCAL_THREADS) with a floor of 1.
std::size_t max_threads();

/// Static-partition parallel loop over [0, n). `body(begin, end)` is invoked
/// once per chunk; chunks are disjoint, so bodies may write to per-index slots
/// without synchronization. Runs serially for small n or when capped to one
/// thread; results are identical either way.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace discflow
