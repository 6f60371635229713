// parallel.hpp - index-ordered parallel loops
//
// QIG_THREADS caps the worker count; 0 or unset-and-single-core runs
// serially. Results are written by index, so reductions over them are
// independent of scheduling.

#pragma once

#include <cstddef>
#include <functional>

namespace qig {

// Worker count from QIG_THREADS (default: hardware concurrency; 0 = serial).
unsigned thread_count();

// Calls body(i) for i in [0, count). The first exception thrown by any body
// is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qig
