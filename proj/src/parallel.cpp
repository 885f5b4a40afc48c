#include "bpm/parallel.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bpm {

int max_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("BPM_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

namespace detail {

void run_indexed(Exec exec, int64_t n, void (*body)(int64_t, void*), void* ctx) {
#ifdef _OPENMP
  if (exec == Exec::Parallel && n > 1) {
    const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int64_t i = 0; i < n; ++i) body(i, ctx);
    return;
  }
#else
  (void)exec;
#endif
  for (int64_t i = 0; i < n; ++i) body(i, ctx);
}

}  // namespace detail
}  // namespace bpm
