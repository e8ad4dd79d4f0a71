#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "magpat/field.hpp"
#include "magpat/params.hpp"

namespace magpat {

/// All energy components of a field. `reduced` is the two-dimensional
/// energy local - nonlocal; `film` adds the thickness corrections and the
/// exterior charge term (all nonnegative up to quadrature error).
struct EnergyBreakdown {
  double local = 0.0;     // log-weighted exchange + anisotropy sum
  double nonlocal = 0.0;  // restricted H^{1/2}-type double sum of m3
  double reduced = 0.0;   // local - nonlocal
  double bv = 0.0;        // total variation of m3

  // Thickness corrections. The first two vanish identically for fields
  // extruded uniformly over the film height, which is the only field class
  // this engine evaluates; they are kept in the record for completeness.
  double excess_exchange = 0.0;
  double vertical_variation = 0.0;
  double gamma_deficit = 0.0;
  double exterior_charge = 0.0;
  double divergence_term = 0.0;
  double correction = 0.0;  // sum of the five terms above
  double film = 0.0;        // reduced + correction

  double exterior_tail = 0.0;    // reported truncation tail of the exterior term
  double reduction_error = 0.0;  // reported magnitude of the dropped dimensional-reduction error
};

/// Masked difference stencil shared by the local energy, the BV norm and
/// the discrete divergence: central differences in the interior, one-sided
/// where only one neighbor is inside, zero where isolated.
std::array<std::vector<double>, 2> masked_gradient(const DomainMask& mask,
                                                   const std::vector<double>& v);

double local_energy(const Magnetization2D& m, const ParameterSet& p);
double bv_norm(const Magnetization2D& m);
/// Modica-Mortola integrand sum minus the BV norm (nonnegative in the
/// continuum for unit fields; the sharp-jump caveat of the discrete stencil
/// is the caller's concern).
double modica_mortola_gap(const Magnetization2D& m, const ParameterSet& p);

double nonlocal_energy(const Magnetization2D& m);
double nonlocal_energy_finite_range(const Magnetization2D& m, double range);

EnergyBreakdown reduced_energy(const Magnetization2D& m, const ParameterSet& p);
double reduced_energy_finite_range(const Magnetization2D& m,
                                   const ParameterSet& p, double range);

/// Film energy via the kernel-corrected representation: reduced energy plus
/// the Gamma-deficit, exterior-charge and divergence correction terms. The
/// exterior integral is truncated at exterior_radius_factor * diam with the
/// analytic tail reported in the breakdown.
EnergyBreakdown film_energy(const Magnetization2D& m, const ParameterSet& p,
                            double exterior_radius_factor = 10.0);

/// Reduced stray-field energy of the vertical charges (out-of-plane
/// component), evaluated over all pairs with m3 extended by zero.
double stray_vertical(const Magnetization2D& m, double thickness);
/// Reduced stray-field energy of the in-plane charges: volume divergence
/// plus lateral boundary charges, with per-element self-interaction from
/// exact cell/segment correlation integrals.
double stray_tangential(const Magnetization2D& m, double thickness);

struct StrayOracleResult {
  double vertical = 0.0;
  double tangential = 0.0;
  double total = 0.0;  // cross terms vanish by the height-symmetry identity
};

/// Brute-force real-space stray energy from the full charge set of the
/// extruded field (face, volume and lateral charges) with height integrals
/// in closed form; each cell split depth x depth. Refuses grids above
/// 64^2 inside cells.
StrayOracleResult stray_oracle(const Magnetization2D& m, double thickness,
                               int depth = 3);

// Serial reference implementations, kept for testing and benchmarking the
// OpenMP pair sums against.
double nonlocal_energy_serial(const Magnetization2D& m);
double nonlocal_energy_finite_range_serial(const Magnetization2D& m,
                                           double range);

/// Process-wide floor check: every reduced-energy evaluation is recorded
/// against the universal lower bound -(pi^2 e / 4 + slack) |Omega|.
class EnergyFloorSentinel {
 public:
  static void record(double reduced, double area);
  static std::size_t violations();
  static double worst_margin();  // min over evaluations of reduced - floor
  static void reset();
};

/// pi^2 e / 4, the coefficient of the universal lower bound.
double energy_floor_coefficient();

}  // namespace magpat
