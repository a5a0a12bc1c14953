#pragma once

#include <cstddef>
#include <functional>

namespace qgpatch {

// Worker count: QGPATCH_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index must write only its own outputs,
// which keeps results independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qgpatch
