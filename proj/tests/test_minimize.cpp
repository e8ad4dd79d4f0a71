#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "magpat/energy.hpp"
#include "magpat/experiments.hpp"
#include "magpat/minimize.hpp"
#include "magpat/params.hpp"

using namespace magpat;

TEST_CASE("projected gradient vanishes at the uniform states") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 16);
  const ParameterSet p = derive(1e-2, 2.0);
  for (double s : {1.0, -1.0}) {
    auto m = Magnetization2D::uniform(mask, {0, 0, s});
    const auto g = reduced_energy_gradient(m, p);
    for (std::size_t k = 0; k < m.size(); ++k) {
      CHECK(g.g1[k] == 0.0);
      CHECK(g.g2[k] == 0.0);
      CHECK(g.g3[k] == 0.0);
    }
  }
}

TEST_CASE("nonlocal gradient vanishes for constant m3") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 12);
  const ParameterSet pa = derive(1e-2, 2.0);
  // In-plane unit field: m3 constant zero, so only exchange acts on g3.
  Magnetization2D m(mask);
  for (std::size_t k = 0; k < m.size(); ++k) {
    m.m1(k) = 1.0;
    m.m2(k) = 0.0;
    m.m3(k) = 0.0;
  }
  const auto g = reduced_energy_gradient(m, pa);
  // Anisotropy pulls along e3 only through m3 = 0, exchange is zero for the
  // constant field, and the pair term vanishes; projection leaves nothing.
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(std::abs(g.g3[k]) < 1e-12);
}

TEST_CASE("gradient matches central finite differences of the energy") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 16);
  const ParameterSet p = derive(1e-2, 2.0);
  auto m = Magnetization2D::random_unit(mask, 11);
  const auto g = reduced_energy_gradient(m, p);
  const double h2 = mask.grid_spacing() * mask.grid_spacing();

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int d = 0; d < 20; ++d) {
    std::vector<double> vx(m.size()), vy(m.size()), vz(m.size());
    double dir = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      double a = gauss(rng), b = gauss(rng), c = gauss(rng);
      const double dp = a * m.m1(k) + b * m.m2(k) + c * m.m3(k);
      a -= dp * m.m1(k);
      b -= dp * m.m2(k);
      c -= dp * m.m3(k);
      vx[k] = a;
      vy[k] = b;
      vz[k] = c;
      dir += (g.g1[k] * a + g.g2[k] * b + g.g3[k] * c) * h2;
    }
    const double tau = 1e-6;
    Magnetization2D mp = m, mm = m;
    for (std::size_t k = 0; k < m.size(); ++k) {
      mp.m1(k) += tau * vx[k];
      mp.m2(k) += tau * vy[k];
      mp.m3(k) += tau * vz[k];
      mm.m1(k) -= tau * vx[k];
      mm.m2(k) -= tau * vy[k];
      mm.m3(k) -= tau * vz[k];
    }
    const double fd =
        (reduced_energy(mp, p).reduced - reduced_energy(mm, p).reduced) /
        (2.0 * tau);
    CHECK(std::abs(fd - dir) / std::max(1.0, std::abs(fd)) <= 1e-5);
  }
}

TEST_CASE("uniform start terminates immediately at zero energy") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 0.3), 24);
  const ParameterSet p = derive(1e-2, 2.0);
  MinimizeConfig cfg;
  const auto res =
      minimize(Magnetization2D::uniform(mask, {0, 0, 1}), p, cfg);
  CHECK(res.reason == StopReason::converged);
  CHECK(res.trace.size() == 1);
  CHECK(res.trace.front().reduced == 0.0);
  CHECK(res.trace.front().grad_norm == 0.0);
}

TEST_CASE("descent is monotone and keeps the constraint") {
  // Grid fine enough that the exchange term dominates every
  // cell-alternating trial state (see the discretization-safety notes).
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 32);
  const ParameterSet p = derive(1e-2, 2.0);
  MinimizeConfig cfg;
  cfg.max_iterations = 60;
  const auto res = minimize(Magnetization2D::random_unit(mask, 3), p, cfg);
  REQUIRE(res.trace.size() >= 2);
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i].reduced <= res.trace[i - 1].reduced + 1e-12);
  CHECK_NOTHROW(res.field.validate(1e-10));
}

TEST_CASE("impossible line search stalls cleanly") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 8);
  const ParameterSet p = derive(1e-2, 2.0);
  MinimizeConfig cfg;
  cfg.max_backtracks = 2;
  cfg.armijo = 1e12;  // unsatisfiable sufficient-decrease requirement
  const auto res = minimize(Magnetization2D::random_unit(mask, 3), p, cfg);
  CHECK(res.reason == StopReason::stalled);
}

TEST_CASE("config validation") {
  MinimizeConfig cfg;
  cfg.backtrack = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = MinimizeConfig{};
  cfg.grad_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = MinimizeConfig{};
  cfg.initial_step = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("trace CSV carries the expected header and rows") {
  std::vector<TraceRow> rows{{0, -1.0, 2.0, 3.0, 0.5, 0.25, 0.125}};
  const std::string csv = trace_csv(rows);
  CHECK(csv.rfind("iteration,F,L,N,BV,gradnorm,step\n", 0) == 0);
  CHECK(csv.find("\n0,-1,2,3,0.5,0.25,0.125\n") != std::string::npos);
}

TEST_CASE("identical seeds reproduce the run exactly") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 32);
  const ParameterSet p = derive(1e-2, 2.0);
  MinimizeConfig cfg;
  cfg.max_iterations = 25;
  const auto a = minimize(Magnetization2D::random_unit(mask, 21), p, cfg);
  const auto b = minimize(Magnetization2D::random_unit(mask, 21), p, cfg);
  CHECK(trace_csv(a.trace) == trace_csv(b.trace));
  CHECK(a.field.m3() == b.field.m3());
}

TEST_CASE("zz: no energy-floor violations in this binary") {
  CHECK(magpat::EnergyFloorSentinel::violations() == 0);
}
