#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace magpat::quad {

/// Thrown when adaptive refinement hits the depth cap before reaching the
/// requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

struct Options {
  double abs_tol = 1e-10;
  int max_depth = 50;
};

/// Adaptive Simpson on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 Options opt = {});

/// Adaptive Simpson with forced subdivision at the given knots
/// (knots must be increasing; integrates [knots.front(), knots.back()]).
/// The tolerance is split evenly across segments.
double integrate_segments(const std::function<double(double)>& f,
                          std::span<const double> knots, Options opt = {});

/// Fixed-order Gauss-Legendre rule on [a, b]; robust building block for
/// nested integrals of smooth integrands where adaptive error estimates
/// would chase each other's noise.
struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int n);

template <class F>
double gauss(F&& f, double a, double b, int n = 64) {
  const GaussRule& rule = gauss_rule(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * s;
}

}  // namespace magpat::quad
