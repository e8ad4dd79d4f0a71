#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magpat/energy.hpp"
#include "magpat/field.hpp"
#include "magpat/params.hpp"

namespace magpat {

/// Variational gradient (per unit area) projected onto the tangent space of
/// the sphere at each cell.
struct TangentField {
  std::vector<double> g1, g2, g3;
};

TangentField reduced_energy_gradient(const Magnetization2D& m,
                                     const ParameterSet& p);

enum class StopReason { converged, max_iterations, stalled };
const char* to_string(StopReason r);

struct TraceRow {
  int iteration = 0;
  double reduced = 0.0;
  double local = 0.0;
  double nonlocal = 0.0;
  double bv = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct MinimizeConfig {
  int max_iterations = 400;
  double grad_tol = 1e-6;
  double initial_step = 0.0;  // 0 selects eps / |ln eps|
  double backtrack = 0.5;
  int max_backtracks = 40;
  double growth = 1.3;
  double armijo = 1e-4;

  void validate() const;
};

struct MinimizeResult {
  Magnetization2D field;
  std::vector<TraceRow> trace;
  StopReason reason = StopReason::max_iterations;
};

/// Projected gradient descent with backtracking line search; every iterate
/// is retracted to the sphere by per-cell normalization and the energy is
/// nonincreasing along accepted steps.
MinimizeResult minimize(const Magnetization2D& m0, const ParameterSet& p,
                        const MinimizeConfig& cfg);

/// CSV dump of a trace: iteration,F,L,N,BV,gradnorm,step.
std::string trace_csv(const std::vector<TraceRow>& trace);

}  // namespace magpat
