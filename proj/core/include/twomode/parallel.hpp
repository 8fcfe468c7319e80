#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace twomode {

/// Number of worker threads. Honors TWOMODE_THREADS when set to a positive
/// integer, otherwise uses the hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on worker_count() threads with static
/// contiguous chunks. Bodies must write only to slots they own.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation with a fixed split order, so results do not
/// depend on how the inputs were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace twomode
