#include "magpat/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace magpat {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
}  // namespace

ParameterSet derive(double epsilon, double Q) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("epsilon must lie in (0, 1)");
  if (!(Q > 1.0)) throw std::domain_error("quality factor must be > 1");
  ParameterSet p;
  p.epsilon = epsilon;
  p.Q = Q;
  p.log_eps = -std::log(epsilon);
  p.omega = 2.0 * kPi * (Q - 1.0) * epsilon / p.log_eps;
  p.d_over_s = epsilon * std::sqrt(Q - 1.0);
  p.s_over_t = p.log_eps / (2.0 * kPi * (Q - 1.0) * epsilon);
  p.d_over_t = p.log_eps / (2.0 * kPi * std::sqrt(Q - 1.0));
  return p;
}

double onset_threshold(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("epsilon must lie in (0, 1)");
  const double log_eps = -std::log(epsilon);
  const double factor = 1.0 - 2.0 / log_eps;
  if (!(factor > 0.0))
    throw std::domain_error("threshold formula nonpositive");
  return onset_threshold_limit() * factor;
}

double onset_threshold_limit() { return kPi / (2.0 * kE); }

}  // namespace magpat
