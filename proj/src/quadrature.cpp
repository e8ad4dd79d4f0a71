#include "magpat/quadrature.hpp"

#include <cmath>
#include <vector>

namespace magpat::quad {

namespace {

struct Frame {
  double a, fa, b, fb, m, fm, whole, tol;
  int depth;
};

double simpson(double fa, double fm, double fb, double len) {
  return len / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa,
                double b, double fb, double m, double fm, double whole,
                double tol, int depth, int max_depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double err = left + right - whole;
  // Round-off floor: a leaf cannot resolve below machine precision of its
  // own magnitude.
  const double tol_eff =
      std::max(tol, 4e-16 * (std::abs(left) + std::abs(right)));
  if (std::abs(err) <= 15.0 * tol_eff || (b - a) < 1e-300) {
    return left + right + err / 15.0;
  }
  if (depth >= max_depth) {
    throw QuadratureError("adaptive quadrature did not converge to tolerance");
  }
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1,
                  max_depth) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1,
                  max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 Options opt) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = simpson(fa, fm, fb, b - a);
  return adaptive(f, a, fa, b, fb, m, fm, whole, opt.abs_tol, 0, opt.max_depth);
}

double integrate_segments(const std::function<double(double)>& f,
                          std::span<const double> knots, Options opt) {
  if (knots.size() < 2) throw std::invalid_argument("need at least two knots");
  double total = 0.0;
  Options seg = opt;
  seg.abs_tol = opt.abs_tol / static_cast<double>(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    if (!(b >= a)) throw std::invalid_argument("knots must be increasing");
    if (b == a) continue;
    total += integrate(f, a, b, seg);
  }
  return total;
}

namespace {

GaussRule make_gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double x = std::cos(3.141592653589793 * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] =
        2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static const GaussRule g32 = make_gauss_rule(32);
  static const GaussRule g64 = make_gauss_rule(64);
  static const GaussRule g128 = make_gauss_rule(128);
  if (n == 32) return g32;
  if (n == 128) return g128;
  return g64;
}

}  // namespace magpat::quad
