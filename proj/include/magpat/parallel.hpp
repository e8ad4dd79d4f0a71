#pragma once

#include <cstddef>
#include <vector>

#include <omp.h>

namespace magpat {

/// Compensated (Kahan) accumulator.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

/// Sum row(i) for i in [0, n) with a reduction that is bit-reproducible
/// across runs at a fixed thread count: static partition, per-thread
/// compensated partials, partials combined in thread order.
template <class RowFn>
double deterministic_row_sum(std::size_t n, RowFn&& row) {
  const int nthreads = omp_get_max_threads();
  std::vector<KahanSum> partial(static_cast<std::size_t>(nthreads));

#pragma omp parallel num_threads(nthreads)
  {
    const int t = omp_get_thread_num();
    KahanSum local;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      local.add(row(static_cast<std::size_t>(i)));
    }
    partial[static_cast<std::size_t>(t)] = local;
  }

  KahanSum total;
  for (const auto& p : partial) total.add(p.value());
  return total.value();
}

/// Serial reference for deterministic_row_sum, kept for testing and
/// benchmarking against the parallel path.
template <class RowFn>
double serial_row_sum(std::size_t n, RowFn&& row) {
  KahanSum total;
  for (std::size_t i = 0; i < n; ++i) total.add(row(i));
  return total.value();
}

}  // namespace magpat
