#pragma once

#include <cstdint>

namespace bpm {

// Execution policy for the data-parallel kernels. Every parallel kernel
// keeps a serial path that produces bit-identical results; tests compare
// the two and benchmarks time them against each other.
enum class Exec { Serial, Parallel };

// Worker count used by Exec::Parallel. Respects the BPM_THREADS
// environment variable as an upper cap; 1 when built without OpenMP.
int max_threads();

namespace detail {
void run_indexed(Exec exec, int64_t n, void (*body)(int64_t, void*), void* ctx);
}

// parallel_for(exec, n, fn): fn(i) for i in [0, n). Iterations must be
// independent; results are deterministic because each index writes only
// its own slots.
template <typename Fn>
void parallel_for(Exec exec, int64_t n, Fn&& fn) {
  auto trampoline = [](int64_t i, void* ctx) { (*static_cast<Fn*>(ctx))(i); };
  detail::run_indexed(exec, n, trampoline, &fn);
}

}  // namespace bpm
