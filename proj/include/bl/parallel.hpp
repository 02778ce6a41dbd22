#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bl::par {

enum class Mode { serial, parallel };

/// Worker count: hardware threads, optionally capped by the BL_THREADS env var.
inline int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* cap = std::getenv("BL_THREADS")) {
    int c = std::atoi(cap);
    if (c >= 1 && c < n) n = c;
  }
  return n;
}

namespace detail {

// Chunk count is a pure function of n, never of the thread count, so that the
// reduction order (and therefore the floating-point result) is identical for
// the serial reference and every parallel schedule.
inline std::int64_t chunk_count(std::int64_t n) {
  std::int64_t c = (n + 1023) / 1024;
  if (c < 1) c = 1;
  if (c > 4096) c = 4096;
  return c;
}

struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

/// Deterministic chunked reduction of term(0) + ... + term(n-1).
/// Serial and parallel modes produce bit-identical results.
template <class F>
double sum_indexed(std::int64_t n, F&& term, Mode mode = Mode::parallel) {
  if (n <= 0) return 0.0;
  const std::int64_t chunks = detail::chunk_count(n);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);

  auto run_chunk = [&](std::int64_t c) {
    const std::int64_t begin = c * n / chunks;
    const std::int64_t end = (c + 1) * n / chunks;
    detail::Kahan acc;
    for (std::int64_t i = begin; i < end; ++i) acc.add(term(i));
    partial[static_cast<std::size_t>(c)] = acc.sum;
  };

  if (mode == Mode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
#endif
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  }

  detail::Kahan total;
  for (double p : partial) total.add(p);
  return total.sum;
}

/// Same reduction for K simultaneous accumulators (e.g. sum and sum of squares).
template <std::size_t K, class F>
std::array<double, K> sum_indexed_multi(std::int64_t n, F&& term, Mode mode = Mode::parallel) {
  std::array<double, K> out{};
  if (n <= 0) return out;
  const std::int64_t chunks = detail::chunk_count(n);
  std::vector<std::array<double, K>> partial(static_cast<std::size_t>(chunks));

  auto run_chunk = [&](std::int64_t c) {
    const std::int64_t begin = c * n / chunks;
    const std::int64_t end = (c + 1) * n / chunks;
    std::array<detail::Kahan, K> acc;
    for (std::int64_t i = begin; i < end; ++i) {
      std::array<double, K> v = term(i);
      for (std::size_t k = 0; k < K; ++k) acc[k].add(v[k]);
    }
    for (std::size_t k = 0; k < K; ++k) partial[static_cast<std::size_t>(c)][k] = acc[k].sum;
  };

  if (mode == Mode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
#endif
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  }

  std::array<detail::Kahan, K> total;
  for (const auto& p : partial)
    for (std::size_t k = 0; k < K; ++k) total[k].add(p[k]);
  for (std::size_t k = 0; k < K; ++k) out[k] = total[k].sum;
  return out;
}

/// Parallel map over [0, n); body must be safe to run concurrently.
template <class F>
void for_each(std::int64_t n, F&& body, Mode mode = Mode::parallel) {
  if (n <= 0) return;
  if (mode == Mode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace bl::par
