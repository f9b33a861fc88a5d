#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cosparse::parallel {

// True when the build has OpenMP support compiled in.
inline bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

// Runs fn(i) for i in [0, n). With threads > 1 and OpenMP available the
// iterations run in parallel; each fn(i) must only write state owned by
// index i (typically a preallocated output slot seeded from a per-index
// child RNG stream), so results are identical for every thread count.
template <class F>
void for_each_index(std::int64_t n, int threads, F&& fn) {
#ifdef _OPENMP
  if (threads > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
#endif
  (void)threads;
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

// Sum in fixed index order. Reductions over per-index slots happen here,
// serially, so floating-point results do not depend on the thread count.
inline double ordered_sum(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr r;
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return r;
  r.mean = ordered_sum(values) / n;
  if (values.size() < 2) return r;
  double sq = 0.0;
  for (double v : values) sq += (v - r.mean) * (v - r.mean);
  r.std_error = std::sqrt(sq / (n * (n - 1.0)));
  return r;
}

}  // namespace cosparse::parallel
