#pragma once

#include <cstddef>
#include <functional>

namespace planetforge {

// Worker count for internal loops. Defaults to the hardware concurrency,
// capped by the PLANETFORGE_THREADS environment variable when set.
unsigned worker_count();

// Overrides worker_count() for the current process; 0 restores the default.
void set_worker_count(unsigned n);

// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
// visited exactly once; bodies must write only to index-owned storage so the
// result is independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace planetforge
