#include "magpat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "magpat/quadrature.hpp"

namespace magpat::kernels {

namespace {
constexpr double kPi = std::numbers::pi;

void require_nonnegative(double alpha) {
  if (!(alpha >= 0.0)) throw std::domain_error("kernel argument must be >= 0");
}
}  // namespace

double gamma(double alpha) {
  require_nonnegative(alpha);
  // 1 - a/sqrt(1+a^2) = 1 / (sqrt(1+a^2) (sqrt(1+a^2) + a)); avoids
  // cancellation for large a.
  const double s = std::sqrt(1.0 + alpha * alpha);
  return std::clamp(2.0 * alpha * alpha / (s * (s + alpha)), 0.0, 1.0);
}

double theta(double alpha) {
  require_nonnegative(alpha);
  if (alpha == 0.0) return 0.0;
  const double s = std::sqrt(1.0 + alpha * alpha);
  // 2 (a^2 - a sqrt(1+a^2)) = -2a / (sqrt(1+a^2) + a), stable for all a.
  const double tail = -2.0 * alpha / (s + alpha);
  // a * asinh(1/a) -> 0 as a -> 0; use the log expansion below 1e-8 to
  // sidestep the 0 * inf evaluation order.
  const double head = (alpha < 1e-8)
                          ? 2.0 * alpha * (std::log(2.0) - std::log(alpha))
                          : 2.0 * alpha * std::asinh(1.0 / alpha);
  return std::clamp(head + tail, 0.0, 1.0);
}

double newton_kernel(double planar_dist, double height) {
  const double r2 = planar_dist * planar_dist + height * height;
  if (r2 == 0.0) throw std::domain_error("Newton kernel singular at the origin");
  return 1.0 / (4.0 * kPi * std::sqrt(r2));
}

double newton_kernel_fourier(double freq_mag, double height) {
  if (freq_mag == 0.0)
    throw std::domain_error("Fourier kernel singular at zero frequency");
  if (freq_mag < 0.0) throw std::domain_error("frequency magnitude must be >= 0");
  return std::exp(-std::abs(height) * freq_mag) / (4.0 * kPi * freq_mag);
}

double slab_kernel(double r, double thickness) {
  if (r <= 0.0) throw std::domain_error("slab kernel singular at r = 0");
  if (thickness <= 0.0) throw std::domain_error("thickness must be > 0");
  const double t2 = thickness * thickness;
  return t2 / (4.0 * kPi * r * r * r) * gamma(r / thickness);
}

double thin_film_multiplier(int index, double freq_mag, double x3,
                            double thickness) {
  if (index < 1 || index > 3) throw std::domain_error("multiplier index in {1,2,3}");
  if (freq_mag < 0.0) throw std::domain_error("frequency magnitude must be >= 0");
  if (!(x3 > 0.0 && x3 < thickness))
    throw std::domain_error("height must lie strictly inside the film");
  const double ea = std::exp(-freq_mag * (thickness - x3));
  const double eb = std::exp(-freq_mag * x3);
  switch (index) {
    case 1:
      return 0.5 * (ea + eb - 2.0);
    case 2:
      return 0.5 * (ea - eb);
    default:
      return 0.5 * (ea + eb);
  }
}

double height_pair_kernel(double r, double thickness) {
  if (r <= 0.0) throw std::domain_error("height pair kernel singular at r = 0");
  if (thickness <= 0.0) throw std::domain_error("thickness must be > 0");
  // 2 (Psi(r,0) - Psi(r,t)) with Psi(r,z) = (sqrt(r^2+z^2) - z asinh(z/r)) / 4pi.
  const double t = thickness;
  return (r - std::sqrt(r * r + t * t) + t * std::asinh(t / r)) / (2.0 * kPi);
}

double gamma_from_kernel(double alpha) {
  if (alpha <= 0.0) throw std::domain_error("oracle requires alpha > 0");
  const double g1 = 2.0 * (newton_kernel(alpha, 0.0) - newton_kernel(alpha, 1.0));
  return 4.0 * kPi * alpha * alpha * alpha * g1;
}

double theta_from_kernel(double alpha) {
  if (alpha <= 0.0) throw std::domain_error("oracle requires alpha > 0");
  quad::Options inner_opt{.abs_tol = 1e-13, .max_depth = 50};
  quad::Options outer_opt{.abs_tol = 1e-10, .max_depth = 50};
  auto inner = [&](double u) {
    // Split at v = u where the integrand peaks.
    auto g = [&](double v) { return newton_kernel(alpha, u - v); };
    const double knots[] = {0.0, u, 1.0};
    return quad::integrate_segments(g, knots, inner_opt);
  };
  const double ii = quad::integrate(inner, 0.0, 1.0, outer_opt);
  return 4.0 * kPi * alpha * ii;
}

double unit_tail_integral() {
  // Substitution rho = u/(1-u) turns the integrand into the smooth
  // 1 / (sqrt((1-u)^2 + u^2) (sqrt((1-u)^2 + u^2) + u)) on [0, 1].
  auto f = [](double u) {
    const double w = 1.0 - u;
    const double s = std::sqrt(w * w + u * u);
    return 1.0 / (s * (s + u));
  };
  return quad::integrate(f, 0.0, 1.0, {.abs_tol = 1e-12, .max_depth = 50});
}

namespace {

// Derivatives in cancellation-free form (positive-term rational
// expressions); the naive polynomial forms lose all precision for large a.
double dgamma_dalpha(double a) {
  const double s = std::sqrt(1.0 + a * a);
  const double den = 1.0 + a * a + s * a;
  return (4.0 * a + 2.0 * a * a / s) / (den * den);
}

double dtheta_dalpha(double a) {
  const double s = std::sqrt(1.0 + a * a);
  const double sa = s + a;
  return 2.0 * std::asinh(1.0 / a) - 2.0 / s - 2.0 / (s * sa * sa);
}

}  // namespace

KernelTable::KernelTable(std::size_t n, double alpha_min, double alpha_max) {
  if (n < 4 || alpha_min <= 0.0 || alpha_max <= alpha_min)
    throw std::invalid_argument("bad kernel table parameters");
  u_min_ = std::log(alpha_min);
  u_max_ = std::log(alpha_max);
  du_ = (u_max_ - u_min_) / static_cast<double>(n - 1);
  gamma_.resize(n);
  dgamma_.resize(n);
  theta_.resize(n);
  dtheta_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = u_min_ + du_ * static_cast<double>(i);
    const double a = std::exp(u);
    gamma_[i] = kernels::gamma(a);
    theta_[i] = kernels::theta(a);
    // Hermite data in u = ln(alpha): df/du = alpha * df/dalpha.
    dgamma_[i] = a * dgamma_dalpha(a);
    dtheta_[i] = a * dtheta_dalpha(a);
  }
}

double KernelTable::eval(const std::vector<double>& val,
                         const std::vector<double>& der, double alpha,
                         double (*exact)(double)) const {
  if (!(alpha >= 0.0)) throw std::domain_error("kernel argument must be >= 0");
  if (alpha == 0.0) return 0.0;
  const double u = std::log(alpha);
  if (u <= u_min_ || u >= u_max_) return exact(alpha);
  const double x = (u - u_min_) / du_;
  const std::size_t i = std::min(static_cast<std::size_t>(x), val.size() - 2);
  const double s = x - static_cast<double>(i);
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  const double y = h00 * val[i] + h10 * du_ * der[i] + h01 * val[i + 1] +
                   h11 * du_ * der[i + 1];
  return std::clamp(y, 0.0, 1.0);
}

double KernelTable::gamma(double alpha) const {
  return eval(gamma_, dgamma_, alpha, &kernels::gamma);
}

double KernelTable::theta(double alpha) const {
  return eval(theta_, dtheta_, alpha, &kernels::theta);
}

const KernelTable& KernelTable::shared() {
  static const KernelTable table;
  return table;
}

}  // namespace magpat::kernels
