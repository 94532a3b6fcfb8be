#pragma once

#include <cstdint>
#include <functional>

namespace wcp {

// Runs fn(0..count-1) on up to `workers` threads. Work is handed out through
// an atomic counter; callers write results into preallocated per-index slots
// and reduce afterwards in index order, so the outcome never depends on the
// schedule or the worker count.
void parallel_for(std::int64_t count, unsigned workers,
                  const std::function<void(std::int64_t)>& fn);

unsigned default_workers();

}  // namespace wcp
