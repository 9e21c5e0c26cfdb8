#pragma once

#include <cstdlib>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rcvvar {

// Default worker count: RCVVAR_THREADS if set, otherwise the OpenMP
// maximum (1 in serial builds).
inline int default_parallelism() {
  if (const char* env = std::getenv("RCVVAR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs body(i) for i in [0, count).  threads <= 1 takes the serial
// reference path; otherwise the loop is an OpenMP parallel-for.  Both paths
// produce identical results as long as body(i) writes only to slot i, which
// is how every caller in this project is structured (per-replication
// records indexed by replication id).  Exceptions are captured and
// rethrown after the loop.
template <class F>
void parallel_for(int count, int threads, F&& body) {
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
#else
  for (int i = 0; i < count; ++i) body(i);
#endif
}

}  // namespace rcvvar
