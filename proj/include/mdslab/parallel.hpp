#pragma once

#include <cstddef>
#include <functional>

namespace mdslab {

// Worker cap for parallel loops. 0 means "read MDSLAB_THREADS, else 1".
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
// write results into index-addressed slots so output order never depends on
// scheduling. The first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mdslab
