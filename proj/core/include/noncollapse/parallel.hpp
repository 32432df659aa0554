#pragma once

#include <cstddef>
#include <functional>

namespace noncollapse {

/// Worker count: hardware concurrency, capped by NONCOLLAPSE_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// worker; callers write results into per-index slots and reduce serially, so
/// the outcome does not depend on the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace noncollapse
