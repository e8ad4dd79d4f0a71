#pragma once

#include <cstddef>
#include <vector>

#include "magpat/field.hpp"
#include "magpat/geometry.hpp"

namespace magpat::profiles {

/// Odd one-dimensional transition profile: equals sign(rho) outside the
/// window |rho| < sqrt(eps), and interpolates through
/// sin(pi/2 * arcsin(tanh(rho/eps)) / arcsin(tanh(eps^{-1/2}))) inside.
double transition(double epsilon, double rho);

/// Derivative of the transition profile (zero outside the window).
double transition_derivative(double epsilon, double rho);

/// Window normalization constant arcsin(tanh(eps^{-1/2})).
double transition_window_constant(double epsilon);

/// Sampled profile with its window constant.
struct Profile1D {
  double epsilon = 0.0;
  double window_constant = 0.0;
  std::vector<double> rho;
  std::vector<double> value;

  static Profile1D sample(double epsilon, std::size_t n = 2048,
                          double margin_factor = 0.5);
};

/// One-dimensional wall cost 0.5 * int (eps xi'^2/(1-xi^2) + (1-xi^2)/eps);
/// approaches the sharp-interface optimum 2 from above as eps -> 0.
double profile_local_energy(double epsilon);

struct ProfileNonlocal {
  double inverse_square = 0.0;  // (1/4) iint |dxi|^2 / |rho-rho'|^2
  double inverse = 0.0;         // (1/4) iint |dxi|^2 / |rho-rho'|
  double flat = 0.0;            // (1/4) iint |dxi|^2
};

/// The three window-restricted pair integrals of the profile over
/// [-H, H]^2; requires H >= 2 eps.
ProfileNonlocal profile_nonlocal_energy(double epsilon, double H);

/// Circular reversed-domain construction: orientation * e3 core inside
/// radius R - sqrt(eps), transition annulus, -orientation * e3 from
/// R + sqrt(eps) outward. Requires R > sqrt(eps) and the annulus to fit
/// strictly inside the mask shape.
Magnetization2D disk_bubble(const DomainMask& mask, Vec2 center, double R,
                            double epsilon, int orientation = +1);

struct BubbleLayout {
  std::vector<Vec2> centers;
  double R = 0.0;
  double pitch = 0.0;  // guaranteed pairwise center distance
};

/// Deterministic hex-lattice packing of disjoint bubbles with pairwise rim
/// separation >= 2R and full transition collar inside the domain. Returns
/// an empty layout when nothing fits.
BubbleLayout pack_bubbles(const DomainMask& mask, double R, double epsilon);

/// Composite field: a reversed bubble (core -e3) in every layout disk on a
/// uniform +e3 background. Pass a single-center layout to get the
/// isolated-bubble field used by the decoupling checks.
Magnetization2D multi_bubble_field(const DomainMask& mask,
                                   const BubbleLayout& layout, double epsilon);

struct BubbleGap {
  double local = 0.0;           // coarea-reduced local energy of the annulus
  double nonlocal_lower = 0.0;  // tube-restricted nonlocal energy (rigorous lower bound)
  double gap = 0.0;             // nonlocal_lower - local
};

/// Quadrature evaluation of the single-bubble energy gap: the coarea
/// integral for the local part and the exact tube-restricted pair integral
/// (all pairs within arc distance ell and radial window H) as a lower bound
/// for the nonlocal part. gap > 0 certifies that the construction beats the
/// uniform state in the finite-range energy. Enforces the window ordering
/// H >= 2, ell >= 4H, R >= 4 ell.
BubbleGap bubble_energy_gap(double epsilon, double R, double H, double ell);

struct BubbleGapDefaults {
  double epsilon = 1e-3;
  double R = 200.0;
  double H = 8.0;
  double ell = 40.0;
};

}  // namespace magpat::profiles
