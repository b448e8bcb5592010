#pragma once

#include <cstddef>
#include <utility>

namespace vem {

/// Execution policy for the per-node kernels. Serial is the reference path;
/// Parallel runs the same loop bodies under OpenMP. Outputs are bitwise
/// identical: parallel loops only fill disjoint slots, every reduction is a
/// fixed-order serial pass over precomputed per-node values.
enum class Exec { Serial, Parallel };

namespace detail {
// Below this trip count the fork/join overhead dominates the node work.
inline constexpr int kParallelGrain = 64;
}  // namespace detail

template <typename F>
inline void parallel_for(Exec exec, int count, F&& body) {
#ifdef _OPENMP
  if (exec == Exec::Parallel && count >= detail::kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
#else
  (void)exec;
#endif
  for (int i = 0; i < count; ++i) {
    body(i);
  }
}

}  // namespace vem
