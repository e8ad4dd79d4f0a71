#pragma once

#include <cstddef>
#include <vector>

namespace magpat::kernels {

/// Attenuation factor of the vertical-charge slab kernel, monotone from 0
/// to 1: gamma(a) = 2a^2 (1 - a / sqrt(1 + a^2)), evaluated in a
/// cancellation-free form.
double gamma(double alpha);

/// Attenuation factor of the in-plane-charge slab kernel, monotone from 0
/// to 1: theta(a) = 2 (a asinh(1/a) + a^2 - a sqrt(1 + a^2)).
double theta(double alpha);

/// Newton kernel in R^3 split into planar distance and height:
/// 1 / (4 pi sqrt(r^2 + z^2)).
double newton_kernel(double planar_dist, double height);

/// Planar Fourier transform of the Newton kernel at height z:
/// exp(-|z| |xi|) / (4 pi |xi|).
double newton_kernel_fourier(double freq_mag, double height);

/// Height-integrated vertical-charge kernel for a film of the given
/// thickness: G_t(r) = (t^2 / (4 pi r^3)) gamma(r/t).
double slab_kernel(double r, double thickness);

/// Fourier multipliers of the height-averaged stray field for a film of
/// thickness t, index in {1,2,3}; requires 0 < x3 < t.
double thin_film_multiplier(int index, double freq_mag, double x3,
                            double thickness);

/// Double height integral of the Newton kernel over [0,t]^2 at planar
/// distance r (closed form via the kernel antiderivative); equals
/// (t^2 / (4 pi r)) theta(r/t).
double height_pair_kernel(double r, double thickness);

/// Oracle for gamma from the slab-kernel endpoint identity
/// G_t = 2 (K(r,0) - K(r,t)) with t = 1.
double gamma_from_kernel(double alpha);

/// Oracle for theta from the defining integral: 4 pi a times the adaptive
/// 2-D quadrature of K(a, u - v) over the unit height square.
double theta_from_kernel(double alpha);

/// Adaptive quadrature of the radial slab-kernel integral
/// (1 - rho / sqrt(1 + rho^2)) over [0, inf); exact value 1.
double unit_tail_integral();

/// Sampled gamma/theta on a log-spaced grid with cubic Hermite
/// interpolation; fast path for the O(N^2) energy sums. Closed forms
/// remain the ground truth and are used outside the tabulated range.
class KernelTable {
 public:
  explicit KernelTable(std::size_t n = 4096, double alpha_min = 1e-6,
                       double alpha_max = 1e8);

  double gamma(double alpha) const;
  double theta(double alpha) const;

  static const KernelTable& shared();

 private:
  double eval(const std::vector<double>& val, const std::vector<double>& der,
              double alpha, double (*exact)(double)) const;

  double u_min_, u_max_, du_;
  std::vector<double> gamma_, dgamma_, theta_, dtheta_;
};

}  // namespace magpat::kernels
