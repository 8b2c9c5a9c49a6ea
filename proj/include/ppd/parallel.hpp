#ifndef PPD_PARALLEL_HPP
#define PPD_PARALLEL_HPP

#include <functional>

namespace ppd {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is run
// exactly once; callers write results into per-index slots, so the outcome
// does not depend on the schedule. The first exception is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

// PPD_THREADS if set to a positive integer, else `fallback`.
int thread_count_from_env(int fallback);

}  // namespace ppd

#endif  // PPD_PARALLEL_HPP
