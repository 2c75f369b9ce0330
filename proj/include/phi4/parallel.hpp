#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace phi4 {

/// Runs fn(i) for i in [0, n) across `workers` threads by static block
/// partition.  Callers make results order-independent (write into slot i).
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Pairwise (cascade) summation: bit-identical result for a fixed array
/// regardless of how the array was filled.
double pairwise_sum(std::span<const double> xs);

int default_workers();

}  // namespace phi4
