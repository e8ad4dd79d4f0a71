#include "magpat/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "magpat/quadrature.hpp"

namespace magpat::profiles {

namespace {
constexpr double kPi = std::numbers::pi;

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("epsilon must lie in (0, 1)");
}
}  // namespace

double transition_window_constant(double epsilon) {
  require_epsilon(epsilon);
  return std::asin(std::tanh(1.0 / std::sqrt(epsilon)));
}

double transition(double epsilon, double rho) {
  require_epsilon(epsilon);
  const double w = std::sqrt(epsilon);
  if (rho >= w) return 1.0;
  if (rho <= -w) return -1.0;
  const double A = transition_window_constant(epsilon);
  const double u = std::asin(std::tanh(rho / epsilon));
  return std::sin(0.5 * kPi * u / A);
}

double transition_derivative(double epsilon, double rho) {
  require_epsilon(epsilon);
  const double w = std::sqrt(epsilon);
  if (std::abs(rho) >= w) return 0.0;
  const double A = transition_window_constant(epsilon);
  const double u = std::asin(std::tanh(rho / epsilon));
  // d/drho arcsin(tanh(rho/eps)) = sech(rho/eps)/eps.
  return std::cos(0.5 * kPi * u / A) * (0.5 * kPi / A) /
         (std::cosh(rho / epsilon) * epsilon);
}

Profile1D Profile1D::sample(double epsilon, std::size_t n, double margin_factor) {
  require_epsilon(epsilon);
  Profile1D p;
  p.epsilon = epsilon;
  p.window_constant = transition_window_constant(epsilon);
  const double w = std::sqrt(epsilon) * (1.0 + margin_factor);
  p.rho.resize(n);
  p.value.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = -w + 2.0 * w * static_cast<double>(i) / (n - 1);
    p.rho[i] = r;
    p.value[i] = transition(epsilon, r);
  }
  return p;
}

double profile_local_energy(double epsilon) {
  require_epsilon(epsilon);
  const double A = transition_window_constant(epsilon);
  const double S = 1.0 / std::sqrt(epsilon);
  const double c = 0.5 * kPi / A;
  // After rho = eps * sigma the integrand is
  //   0.5 [ c^2 sech^2(sigma) + cos^2(c arcsin(tanh sigma)) ],
  // smooth on [-S, S] and identically the stated wall-cost integrand.
  auto f = [&](double sigma) {
    const double sech = 1.0 / std::cosh(sigma);
    const double u = std::asin(std::tanh(sigma));
    const double cosv = std::cos(c * u);
    return 0.5 * (c * c * sech * sech + cosv * cosv);
  };
  std::vector<double> knots{-S};
  for (double k : {-10.0, 0.0, 10.0})
    if (k > -S && k < S) knots.push_back(k);
  knots.push_back(S);
  return quad::integrate_segments(f, knots, {.abs_tol = 1e-11, .max_depth = 48});
}

namespace {

/// Inner pair integral over rho' in [-H, H] minus a negligible strip of
/// half-width delta around rho, in log coordinates on each side.
double inner_pair_integral(double epsilon, double H, double rho, int power,
                           double delta) {
  const double xi0 = transition(epsilon, rho);
  auto side = [&](double sign, double extent) {
    if (extent <= delta) return 0.0;
    auto f = [&](double v) {
      const double w = std::exp(v);
      const double d = transition(epsilon, rho + sign * w) - xi0;
      double kern = 1.0;
      if (power == 1) kern = 1.0 / w;
      if (power == 2) kern = 1.0 / (w * w);
      return d * d * kern * w;  // Jacobian of w = e^v
    };
    return quad::integrate(f, std::log(delta), std::log(extent),
                           {.abs_tol = 3e-9, .max_depth = 48});
  };
  return side(+1.0, H - rho) + side(-1.0, H + rho);
}

}  // namespace

ProfileNonlocal profile_nonlocal_energy(double epsilon, double H) {
  require_epsilon(epsilon);
  if (!(H >= 2.0 * epsilon))
    throw std::domain_error("window must satisfy H >= 2 eps");
  const double w = std::sqrt(epsilon);
  const double delta = 1e-12 * std::max(1.0, H);

  ProfileNonlocal out;
  for (int power : {2, 1, 0}) {
    auto outer = [&](double rho) {
      return inner_pair_integral(epsilon, H, rho, power, delta);
    };
    std::vector<double> knots{-H};
    for (double k : {-w, 0.0, w})
      if (k > -H && k < H) knots.push_back(k);
    knots.push_back(H);
    const double value =
        0.25 * quad::integrate_segments(outer, knots,
                                        {.abs_tol = 1e-6, .max_depth = 44});
    if (power == 2) out.inverse_square = value;
    if (power == 1) out.inverse = value;
    if (power == 0) out.flat = value;
  }
  return out;
}

Magnetization2D disk_bubble(const DomainMask& mask, Vec2 center, double R,
                            double epsilon, int orientation) {
  require_epsilon(epsilon);
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("orientation must be +1 or -1");
  const double w = std::sqrt(epsilon);
  if (!(R > w))
    throw std::invalid_argument("bubble radius must exceed the transition half-width");
  if (mask.shape().boundary_distance(center) < R + w)
    throw std::invalid_argument("bubble with its collar does not fit inside the domain");

  Magnetization2D m(mask);
  const double o = orientation;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Vec2 q = mask.cell_center(k) - center;
    const double r = norm(q);
    const double d = R - r;  // signed distance to the bubble rim
    if (d >= w) {
      m.m1(k) = 0.0;
      m.m2(k) = 0.0;
      m.m3(k) = o;
    } else if (d <= -w) {
      m.m1(k) = 0.0;
      m.m2(k) = 0.0;
      m.m3(k) = -o;
    } else {
      const double xi = transition(epsilon, d);
      const double planar = std::sqrt(std::max(0.0, 1.0 - xi * xi));
      m.m1(k) = planar * (-q.y / r);
      m.m2(k) = planar * (q.x / r);
      m.m3(k) = o * xi;
    }
  }
  return m;
}

BubbleLayout pack_bubbles(const DomainMask& mask, double R, double epsilon) {
  require_epsilon(epsilon);
  if (!(R > 0.0)) throw std::invalid_argument("bubble radius must be > 0");
  BubbleLayout layout;
  layout.R = R;
  const double w = std::sqrt(epsilon);
  const double h = mask.grid_spacing();
  // Rim separation >= 2R needs center distance >= 4R; add the collars and a
  // grid margin.
  const double pitch = 4.0 * R + 2.0 * w + 2.0 * h;
  layout.pitch = pitch;
  if (mask.erode(3.0 * R).empty()) return layout;

  const double clearance = R + w + h;
  const Shape& shape = mask.shape();
  const Vec2 lo = shape.bbox_lo();
  const Vec2 hi = shape.bbox_hi();
  const Vec2 mid = 0.5 * (lo + hi);
  const double row_dy = pitch * std::sqrt(3.0) / 2.0;
  // Hex lattice anchored at the bounding-box center so a domain that can
  // host one bubble always gets one.
  const int rows = static_cast<int>(std::ceil((hi.y - lo.y) / row_dy));
  const int cols = static_cast<int>(std::ceil((hi.x - lo.x) / pitch));
  for (int ry = -rows; ry <= rows; ++ry) {
    const double y = mid.y + ry * row_dy;
    const double x_off = (ry % 2 == 0) ? 0.0 : 0.5 * pitch;
    for (int cx = -cols; cx <= cols; ++cx) {
      const Vec2 c{mid.x + x_off + cx * pitch, y};
      if (shape.boundary_distance(c) >= clearance) layout.centers.push_back(c);
    }
  }
  return layout;
}

Magnetization2D multi_bubble_field(const DomainMask& mask,
                                   const BubbleLayout& layout, double epsilon) {
  require_epsilon(epsilon);
  const double w = std::sqrt(epsilon);
  Magnetization2D m = Magnetization2D::uniform(mask, {0.0, 0.0, 1.0});
  for (const Vec2& c : layout.centers) {
    for (std::size_t k = 0; k < m.size(); ++k) {
      const Vec2 q = mask.cell_center(k) - c;
      const double r = norm(q);
      const double d = layout.R - r;
      if (d <= -w) continue;  // untouched background
      if (d >= w) {
        m.m1(k) = 0.0;
        m.m2(k) = 0.0;
        m.m3(k) = -1.0;  // reversed core against the +e3 background
      } else {
        const double xi = transition(epsilon, d);
        const double planar = std::sqrt(std::max(0.0, 1.0 - xi * xi));
        m.m1(k) = planar * (-q.y / r);
        m.m2(k) = planar * (q.x / r);
        m.m3(k) = -xi;
      }
    }
  }
  return m;
}

namespace {

/// Arc integral 2 int_0^{ell/R} |x(0,r1) - x(theta,r2)|^{-3} dtheta on the
/// circle. The chord satisfies Y^2 = b^2 + sigma^2 with b = |r1 - r2| and
/// sigma = 2 sqrt(r1 r2) sin(theta/2); substituting sigma = b tan(psi)
/// leaves a smooth bounded integrand.
double tube_arc_integral(double r1, double r2, double theta_max) {
  const double b = std::abs(r1 - r2);
  const double g = std::sqrt(r1 * r2);
  if (b < 1e-300) return std::numeric_limits<double>::infinity();
  const double sigma_max = 2.0 * g * std::sin(0.5 * theta_max);
  const double psi_max = std::atan(sigma_max / b);
  const double four_g2 = 4.0 * g * g;
  auto f = [&](double psi) {
    const double s = b * std::tan(psi);
    return std::cos(psi) / std::sqrt(1.0 - s * s / four_g2);
  };
  const double integral =
      quad::integrate(f, 0.0, psi_max, {.abs_tol = 1e-10, .max_depth = 40});
  return 2.0 / (g * b * b) * integral;
}

}  // namespace

BubbleGap bubble_energy_gap(double epsilon, double R, double H, double ell) {
  require_epsilon(epsilon);
  if (!(H >= 2.0 && ell >= 4.0 * H && R >= 4.0 * ell))
    throw std::invalid_argument(
        "bubble window ordering violated: need H >= 2, ell >= 4H, R >= 4 ell");
  const double w = std::sqrt(epsilon);
  const double A = transition_window_constant(epsilon);
  const double c = 0.5 * kPi / A;
  const double log_eps = -std::log(epsilon);

  // Local part by the coarea formula on the annulus, rho = eps * sigma.
  auto local_f = [&](double sigma) {
    const double sech = 1.0 / std::cosh(sigma);
    const double u = std::asin(std::tanh(sigma));
    const double cosv = std::cos(c * u);
    const double radius = R - epsilon * sigma;
    const double wall = 0.5 * (c * c * sech * sech + cosv * cosv);
    const double bend = 0.5 * epsilon * epsilon * cosv * cosv / (radius * radius);
    return (wall + bend) * 2.0 * kPi * radius;
  };
  const double S = 1.0 / w;
  std::vector<double> lknots{-S};
  for (double k : {-10.0, 0.0, 10.0})
    if (k > -S && k < S) lknots.push_back(k);
  lknots.push_back(S);
  BubbleGap out;
  out.local = log_eps * quad::integrate_segments(
                            local_f, lknots, {.abs_tol = 1e-9, .max_depth = 48});

  // Tube-restricted nonlocal pair integral: all ordered pairs with radial
  // offsets in (-H, H) and arc separation below ell. Restricting the domain
  // of a pointwise-nonnegative integrand makes this a rigorous lower bound,
  // and every such pair is within planar distance <= sqrt((2H)^2 + ell^2)
  // <= R, so the bound also holds for the finite-range energy at range R.
  // Absolute tolerances target ~1e-3 of the gap at desk-scale windows; the
  // integral itself scales like R |ln eps|.
  const double theta_max = ell / R;
  const double delta = 1e-9;
  auto outer = [&](double rho) {
    const double xi0 = transition(epsilon, rho);
    const double r1 = R - rho;
    auto side = [&](double sign, double extent) {
      if (extent <= delta) return 0.0;
      auto f = [&](double v) {
        const double d = std::exp(v);
        const double rho2 = rho + sign * d;
        const double dxi = transition(epsilon, rho2) - xi0;
        if (dxi == 0.0) return 0.0;
        const double r2 = R - rho2;
        return r1 * r2 * tube_arc_integral(r1, r2, theta_max) * dxi * dxi * d;
      };
      return quad::integrate(f, std::log(delta), std::log(extent),
                             {.abs_tol = 0.5, .max_depth = 44});
    };
    return side(+1.0, H - rho) + side(-1.0, H + rho);
  };
  std::vector<double> nknots{-H};
  for (double k : {-w, 0.0, w})
    if (k > -H && k < H) nknots.push_back(k);
  nknots.push_back(H);
  out.nonlocal_lower =
      0.125 * 2.0 * kPi *
      quad::integrate_segments(outer, nknots,
                               {.abs_tol = 30.0, .max_depth = 40});
  out.gap = out.nonlocal_lower - out.local;
  return out;
}

}  // namespace magpat::profiles
