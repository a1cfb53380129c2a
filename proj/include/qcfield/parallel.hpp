#pragma once

// Static-partition parallel loops. Work is split by index, never by timing,
// so results do not depend on the thread count.

#include <cstddef>
#include <functional>
#include <vector>

namespace qcfield {

/// QCFIELD_THREADS if set to a positive integer, else hardware concurrency.
int thread_count();

/// Calls f(i) for i in [0, n) on up to `threads` threads. The first exception
/// thrown by any call is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f,
                  int threads = thread_count());

/// Pairwise (cascade) summation; the grouping depends only on the length.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace qcfield
