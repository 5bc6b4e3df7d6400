#pragma once

#include <cstddef>
#include <functional>

namespace smarty {

/// Number of worker threads: SMARTY_THREADS if set (clamped to >= 1),
/// otherwise std::thread::hardware_concurrency(). Re-read on every call.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Work items must be independent: each writes
/// only to its own slot, so the result is identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace smarty
