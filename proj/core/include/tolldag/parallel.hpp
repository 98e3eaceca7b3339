#pragma once

#include <cstddef>
#include <functional>

namespace tolldag {

/// Worker count: TOLLDAG_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least one).
std::size_t worker_count();

/// Runs body(0) .. body(n - 1) on up to worker_count() threads. Indices are
/// independent; the first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tolldag
