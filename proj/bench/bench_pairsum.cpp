// Timing comparison of the serial reference pair sums against the OpenMP
// kernels on a few grid sizes.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "magpat/energy.hpp"
#include "magpat/experiments.hpp"
#include "magpat/field.hpp"
#include "magpat/geometry.hpp"
#include "magpat/minimize.hpp"
#include "magpat/params.hpp"

using namespace magpat;

namespace {

template <class F>
double time_ms(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%8s %10s %14s %14s %9s\n", "grid", "cells", "serial[ms]",
              "parallel[ms]", "speedup");
  const ParameterSet p = derive(1e-2, 2.0);
  for (int n : {24, 48, 64, 96}) {
    const Shape disk = Shape::disk({0.0, 0.0}, 1.0);
    DomainMask mask = build_mask(disk, n);
    Magnetization2D m = Magnetization2D::random_unit(mask, 7);

    volatile double sink = 0.0;
    const int reps = n <= 48 ? 5 : 2;
    const double ts = time_ms([&] { sink = nonlocal_energy_serial(m); }, reps);
    const double tp = time_ms([&] { sink = nonlocal_energy(m); }, reps);
    std::printf("%5dx%-2d %10zu %14.3f %14.3f %8.2fx\n", n, n, mask.cell_count(),
                ts, tp, ts / tp);

    const double tg =
        time_ms([&] { sink = reduced_energy_gradient(m, p).g3[0]; }, reps);
    std::printf("%8s %10s %14s %14.3f  (gradient)\n", "", "", "", tg);
    (void)sink;
  }
  return 0;
}
