#pragma once

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#ifdef QCURV_HAS_OPENMP
#include <omp.h>
#endif

namespace qcurv::par {

enum class Exec { serial, parallel };

// Worker count: QCURV_WORKERS env var, else hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("QCURV_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

inline Exec default_exec() {
  return worker_count() > 1 ? Exec::parallel : Exec::serial;
}

// Serial reference loop. Kept separate so tests and the benchmark can compare
// it against the OpenMP path bit for bit.
template <class F>
void for_each_index_serial(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

// Each index writes only its own output slots, so the result is independent
// of scheduling and worker count.
template <class F>
void for_each_index(std::size_t n, F&& f, Exec mode = default_exec()) {
#ifdef QCURV_HAS_OPENMP
  if (mode == Exec::parallel && n > 1) {
    const int workers = worker_count();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      f(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)mode;
#endif
  for_each_index_serial(n, std::forward<F>(f));
}

inline constexpr std::size_t kReduceBlock = 4096;

// Deterministic sum reduction: fixed-size blocks are accumulated
// independently (parallelizable) and combined in index order, so the result
// does not depend on the number of workers.
template <class F>
double block_sum(std::size_t n, F&& term, Exec mode = default_exec()) {
  const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblocks, 0.0);
  for_each_index(
      nblocks,
      [&](std::size_t b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[b] = s;
      },
      mode);
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace qcurv::par
