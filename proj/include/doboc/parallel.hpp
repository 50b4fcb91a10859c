#pragma once

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace doboc {

// Every data-parallel kernel in the library exists in two forms: a plain
// serial loop (the reference) and an OpenMP loop over agents/blocks.  Both
// write disjoint output slots and reductions are always performed serially
// in index order afterwards, so results are bitwise identical for any
// worker count.
enum class Execution { Serial, OpenMP };

/// Worker count: OpenMP's limit, optionally capped by DOBOC_THREADS.
inline int max_workers() {
  static const int cached = [] {
#ifdef _OPENMP
    int workers = omp_get_max_threads();
#else
    int workers = 1;
#endif
    if (const char* cap = std::getenv("DOBOC_THREADS")) {
      const int requested = std::atoi(cap);
      if (requested >= 1 && requested < workers) workers = requested;
    }
    return workers;
  }();
  return cached;
}

template <class Fn>
void parallel_for(int count, Execution exec, Fn&& body) {
#ifdef _OPENMP
  if (exec == Execution::OpenMP && count > 1 && max_workers() > 1) {
#pragma omp parallel for num_threads(max_workers()) schedule(static)
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
#endif
  (void)exec;
  for (int i = 0; i < count; ++i) body(i);
}

}  // namespace doboc
