#pragma once

#include <cstddef>

namespace stochgm {

/// Worker count used by parallel loops. 0 means "all hardware threads".
void set_jobs(int jobs);
int jobs() noexcept;

/// Runs body(i) for i in [0, n). Iterations must not share mutable state;
/// results are then independent of the worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const long count = static_cast<long>(n);
  const int workers = jobs();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1 && count > 1)
  for (long i = 0; i < count; ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace stochgm
