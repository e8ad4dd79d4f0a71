#pragma once

namespace magpat {

/// Dimensionless parameters of the rescaled model plus all derived ratios
/// to the physical exchange length d, film thickness t and domain scale s.
/// Immutable value type.
struct ParameterSet {
  double epsilon = 0.0;   // transition-layer width / domain width, in (0,1)
  double Q = 0.0;         // quality factor, > 1
  double log_eps = 0.0;   // |ln epsilon|
  double omega = 0.0;     // film aspect ratio t/s = 2 pi (Q-1) eps / |ln eps|
  double d_over_s = 0.0;  // eps sqrt(Q-1)
  double s_over_t = 0.0;  // |ln eps| / (2 pi (Q-1) eps)
  double d_over_t = 0.0;  // |ln eps| / (2 pi sqrt(Q-1))
};

/// Populates all derived ratios; throws on epsilon outside (0,1) or Q <= 1.
ParameterSet derive(double epsilon, double Q);

/// Critical sample diameter below which the uniform states are the only
/// minimizers: (pi / 2e) (1 - 2 / |ln eps|). Requires epsilon < e^-2.
double onset_threshold(double epsilon);

/// Small-epsilon limit of the threshold, pi / (2 e).
double onset_threshold_limit();

}  // namespace magpat
