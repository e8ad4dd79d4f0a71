#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "magpat/energy.hpp"
#include "magpat/experiments.hpp"
#include "magpat/field.hpp"
#include "magpat/geometry.hpp"
#include "magpat/params.hpp"
#include "magpat/profiles.hpp"

using namespace magpat;

namespace {
constexpr double kPi = std::numbers::pi;

// Wall profile extruded along x with the in-plane component keeping |m| = 1.
Magnetization2D extruded_profile(const DomainMask& mask, double eps, double x0) {
  Magnetization2D m(mask);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double xi = profiles::transition(eps, mask.cell_center(k).x - x0);
    m.m1(k) = std::sqrt(std::max(0.0, 1.0 - xi * xi));
    m.m2(k) = 0.0;
    m.m3(k) = xi;
  }
  return m;
}

Magnetization2D sharp_split(const DomainMask& mask, double x0) {
  Magnetization2D m(mask);
  for (std::size_t k = 0; k < m.size(); ++k)
    m.m3(k) = mask.cell_center(k).x < x0 ? -1.0 : 1.0;
  return m;
}

Magnetization2D inplane_divful(const DomainMask& mask) {
  Magnetization2D m(mask);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Vec2 c = mask.cell_center(k);
    const double phi = 1.7 * c.x + 0.9 * std::sin(2.0 * c.y) + 0.3;
    m.m1(k) = std::cos(phi);
    m.m2(k) = std::sin(phi);
    m.m3(k) = 0.0;
  }
  return m;
}

Magnetization2D smooth_mixed(const DomainMask& mask, std::uint64_t seed) {
  auto f = random_smooth_scalar(mask, seed);
  Magnetization2D m(mask);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Vec2 c = mask.cell_center(k);
    const double theta = 0.5 * kPi * f[k];
    const double phi = 2.0 * c.x - 1.3 * c.y;
    m.m1(k) = std::sin(theta) * std::cos(phi);
    m.m2(k) = std::sin(theta) * std::sin(phi);
    m.m3(k) = std::cos(theta);
  }
  return m;
}

}  // namespace

TEST_CASE("local energy vanishes for the uniform states") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 24);
  const ParameterSet p = derive(1e-2, 2.0);
  for (double s : {1.0, -1.0}) {
    auto m = Magnetization2D::uniform(mask, {0, 0, s});
    CHECK(local_energy(m, p) == 0.0);
    CHECK(bv_norm(m) == 0.0);
    CHECK(modica_mortola_gap(m, p) == 0.0);
  }
}

TEST_CASE("in-plane field: anisotropy part equals |ln eps| |O| / (2 eps)") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 32);
  const ParameterSet p = derive(1e-2, 2.0);
  auto m = inplane_divful(mask);
  // Subtract the exchange part computed with the same stencil.
  const auto g1 = masked_gradient(mask, m.m1());
  const auto g2 = masked_gradient(mask, m.m2());
  const auto g3 = masked_gradient(mask, m.m3());
  double dirichlet = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k)
    dirichlet += g1[0][k] * g1[0][k] + g1[1][k] * g1[1][k] +
                 g2[0][k] * g2[0][k] + g2[1][k] * g2[1][k] +
                 g3[0][k] * g3[0][k] + g3[1][k] * g3[1][k];
  const double h2 = mask.grid_spacing() * mask.grid_spacing();
  const double aniso = local_energy(m, p) - p.log_eps * 0.5 * p.epsilon * h2 * dirichlet;
  const double expected = p.log_eps * mask.area() / (2.0 * p.epsilon);
  CHECK(aniso == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("extruded wall profile: local cost per unit length near 2 |ln eps|") {
  const double eps = 1e-2;
  const ParameterSet p = derive(eps, 2.0);
  const double h = eps / 8.0;
  const double width = 16.0 * h;
  GridSpec g{{0.0, 0.0}, h, static_cast<int>(std::lround(1.0 / h)),
             static_cast<int>(std::lround(width / h))};
  DomainMask mask = DomainMask::rasterize(Shape::rectangle({0, 0}, {1, width}), g);
  auto m = extruded_profile(mask, eps, 0.5);
  const double per_len = local_energy(m, p) / width;
  CHECK(per_len == doctest::Approx(2.0 * p.log_eps).epsilon(0.05));
  // Total variation of the profile is exactly 2.
  CHECK(bv_norm(m) / width == doctest::Approx(2.0).epsilon(1e-12));
  // Wall gap stays at the discretization scale.
  CHECK(std::abs(modica_mortola_gap(m, p)) / width < 0.01);
}

TEST_CASE("nonlocal sum: constants and the exact two-cell value") {
  const double h = 0.25;
  GridSpec g{{0.0, 0.0}, h, 2, 1};
  DomainMask mask = DomainMask::rasterize(Shape::rectangle({0, 0}, {2 * h, h}), g);
  REQUIRE(mask.cell_count() == 2);

  Magnetization2D m(mask);
  m.m3(0) = 1.0;
  m.m3(1) = 1.0;
  CHECK(nonlocal_energy(m) == 0.0);

  m.m3(0) = 1.0;
  m.m3(1) = -1.0;
  CHECK(nonlocal_energy(m) == doctest::Approx(h).epsilon(1e-14));
}

TEST_CASE("nonlocal sum: sharp split log-divergence in the grid spacing") {
  const Shape sq = Shape::rectangle({0, 0}, {1, 1});
  double n32 = 0.0, n64 = 0.0;
  {
    DomainMask mask = DomainMask::build(sq, 1.0 / 32.0);
    n32 = nonlocal_energy(sharp_split(mask, 0.5));
    CHECK(bv_norm(sharp_split(mask, 0.5)) ==
          doctest::Approx(2.0).epsilon(2.0 * 2.0 / 32.0));
  }
  {
    DomainMask mask = DomainMask::build(sq, 1.0 / 64.0);
    n64 = nonlocal_energy(sharp_split(mask, 0.5));
  }
  // d N / d ln(1/h) approaches twice the interface length.
  const double slope = (n64 - n32) / std::log(2.0);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  // Regression anchors from the serial double-sum at these resolutions.
  CHECK(n32 == doctest::Approx(6.228036).epsilon(1e-5));
  CHECK(n64 == doctest::Approx(7.593593).epsilon(1e-5));
}

TEST_CASE("mesh consistency of N and L on a smooth field") {
  // First-order Richardson extrapolations from consecutive resolution pairs
  // agree within 2 percent on a smooth field.
  const Shape disk = Shape::disk({0, 0}, 1.0);
  const ParameterSet p = derive(1e-2, 2.0);
  double n[3], l[3];
  int idx = 0;
  for (double h : {1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0}) {
    DomainMask mask = DomainMask::build(disk, h);
    auto m = smooth_mixed(mask, 4);
    n[idx] = nonlocal_energy(m);
    l[idx] = local_energy(m, p);
    ++idx;
  }
  const double n_a = 2.0 * n[1] - n[0];
  const double n_b = 2.0 * n[2] - n[1];
  CHECK(std::abs(n_a - n_b) / std::abs(n_b) < 0.02);
  const double l_a = 2.0 * l[1] - l[0];
  const double l_b = 2.0 * l[2] - l[1];
  CHECK(std::abs(l_a - l_b) / std::abs(l_b) < 0.02);
}

TEST_CASE("reduced energy: uniform states are exact zeros, F <= F_R") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 24);
  const ParameterSet p = derive(1e-2, 2.0);
  for (double s : {1.0, -1.0}) {
    const auto e = reduced_energy(Magnetization2D::uniform(mask, {0, 0, s}), p);
    CHECK(e.reduced == 0.0);
    CHECK(e.local == 0.0);
    CHECK(e.nonlocal == 0.0);
  }
  auto m = Magnetization2D::random_unit(mask, 9);
  const auto e = reduced_energy(m, p);
  CHECK(e.reduced == e.local - e.nonlocal);
  for (double range : {0.1, 0.5, 3.0}) {
    CHECK(e.reduced <= reduced_energy_finite_range(m, p, range) + 1e-12);
  }
  CHECK_THROWS_AS(reduced_energy_finite_range(m, p, 0.0), std::domain_error);
  CHECK_THROWS_AS(nonlocal_energy_finite_range(m, -1.0), std::domain_error);
}

TEST_CASE("uniform states are isolated zeros below the onset threshold") {
  const double eps = 1e-2;
  const double diam = 0.5 * onset_threshold(eps);
  DomainMask mask = build_mask(Shape::disk({0, 0}, diam / 2.0), 16);
  const ParameterSet p = derive(eps, 2.0);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> amp(1e-3, 0.4);
  for (int trial = 0; trial < 1000; ++trial) {
    const double sign = trial % 2 ? 1.0 : -1.0;
    auto m = Magnetization2D::uniform(mask, {0, 0, sign});
    const double lambda = amp(rng);
    for (std::size_t k = 0; k < m.size(); ++k) {
      // Blend toward a random unit direction; the norm stays above 0.2.
      double x = gauss(rng), y = gauss(rng), z = gauss(rng);
      const double nn = std::sqrt(x * x + y * y + z * z) + 1e-300;
      x = (1.0 - lambda) * m.m1(k) + lambda * x / nn;
      y = (1.0 - lambda) * m.m2(k) + lambda * y / nn;
      z = (1.0 - lambda) * m.m3(k) + lambda * z / nn;
      const double norm3 = std::sqrt(x * x + y * y + z * z);
      m.m1(k) = x / norm3;
      m.m2(k) = y / norm3;
      m.m3(k) = z / norm3;
    }
    CHECK(reduced_energy(m, p).reduced > 0.0);
  }
}

TEST_CASE("stray energies match the brute-force oracle on a 32^2 disk") {
  const double t = 0.05;
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 32);

  SUBCASE("uniform vertical charges") {
    auto m = Magnetization2D::uniform(mask, {0, 0, 1});
    const double red = stray_vertical(m, t);
    const auto orc = stray_oracle(m, t, 3);
    CHECK(std::abs(red / orc.vertical - 1.0) < 0.03);
    CHECK(stray_tangential(m, t) == 0.0);
    CHECK(orc.tangential == 0.0);
  }
  SUBCASE("in-plane charges") {
    auto m = inplane_divful(mask);
    const double red = stray_tangential(m, t);
    const auto orc = stray_oracle(m, t, 3);
    CHECK(std::abs(red / orc.tangential - 1.0) < 0.03);
    CHECK(stray_vertical(m, t) == 0.0);
  }
  SUBCASE("mixed field, both parts and the additive split") {
    auto m = smooth_mixed(mask, 17);
    const double v = stray_vertical(m, t);
    const double g = stray_tangential(m, t);
    const auto orc = stray_oracle(m, t, 3);
    CHECK(std::abs(v / orc.vertical - 1.0) < 0.03);
    CHECK(std::abs(g / orc.tangential - 1.0) < 0.03);
    CHECK(std::abs((v + g) / orc.total - 1.0) < 0.03);
  }
}

TEST_CASE("divergence-free vortex carries no tangential charge energy") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 32);
  Magnetization2D m(mask);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Vec2 c = mask.cell_center(k);
    const double r = std::max(norm(c), 1e-12);
    m.m1(k) = -c.y / r;
    m.m2(k) = c.x / r;
    m.m3(k) = 0.0;
  }
  CHECK(std::abs(stray_tangential(m, 0.05)) < 1e-3);
}

TEST_CASE("stray energies are nonnegative on random fields") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 16);
  for (int i = 0; i < 100; ++i) {
    auto m = Magnetization2D::random_unit(mask, 500 + i);
    CHECK(stray_vertical(m, 0.05) > 0.0);
    CHECK(stray_tangential(m, 0.05) > -1e-12);
  }
}

TEST_CASE("vertical stray energy saturates at the face-charge limit") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 32);
  auto m = Magnetization2D::uniform(mask, {0, 0, 1});
  // Face-charge reference (1/2pi) iint_{O x O} |x - y|^{-1} via boundary rays.
  const int nray = 512;
  double ref = 0.0;
  for (std::size_t k = 0; k < mask.cell_count(); ++k) {
    double wsum = 0.0;
    for (int a = 0; a < nray; ++a) {
      const double th = 2.0 * kPi * (a + 0.5) / nray;
      wsum += mask.shape().ray_exit_distance(mask.cell_center(k), th);
    }
    ref += wsum * (2.0 * kPi / nray);
  }
  ref *= mask.grid_spacing() * mask.grid_spacing() / (2.0 * kPi);

  double prev = 0.0;
  for (double t : {2.0, 10.0, 50.0}) {
    const double v = stray_vertical(m, t);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(stray_vertical(m, 50.0) == doctest::Approx(ref).epsilon(0.03));
}

TEST_CASE("stray oracle refuses oversized grids") {
  DomainMask mask = build_mask(Shape::rectangle({0, 0}, {1, 1}), 96);
  REQUIRE(mask.cell_count() > 64 * 64);
  auto m = Magnetization2D::uniform(mask, {0, 0, 1});
  CHECK_THROWS_AS(stray_oracle(m, 0.05, 2), std::runtime_error);
}

TEST_CASE("film energy: uniform state has all corrections zero") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 24);
  const ParameterSet p = derive(1e-3, 2.0);
  for (double s : {1.0, -1.0}) {
    const auto e = film_energy(Magnetization2D::uniform(mask, {0, 0, s}), p);
    CHECK(e.gamma_deficit == 0.0);
    CHECK(e.exterior_charge == 0.0);
    CHECK(e.divergence_term == 0.0);
    CHECK(e.correction == 0.0);
    CHECK(e.film == 0.0);
  }
}

TEST_CASE("film energy: corrections nonnegative and additive") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 16);
  const ParameterSet p = derive(1e-3, 2.0);
  for (int i = 0; i < 20; ++i) {
    auto m = Magnetization2D::random_unit(mask, 700 + i);
    const auto e = film_energy(m, p);
    CHECK(e.gamma_deficit >= 0.0);
    CHECK(e.exterior_charge >= 0.0);
    CHECK(e.divergence_term > -1e-8);
    CHECK(e.correction ==
          doctest::Approx(e.gamma_deficit + e.exterior_charge + e.divergence_term));
    CHECK(e.film == doctest::Approx(e.reduced + e.correction));
    CHECK(e.correction > -1e-8);
    CHECK(e.exterior_tail > 0.0);
    CHECK(e.reduction_error >= 0.0);
  }
}

TEST_CASE("film energy: thickness deficit term vanishes monotonically in eps") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 24);
  auto m = smooth_mixed(mask, 23);
  double prev = 1e300;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto e = film_energy(m, derive(eps, 2.0));
    CHECK(e.gamma_deficit < prev);
    prev = e.gamma_deficit;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("energy floor sentinel records evaluations") {
  EnergyFloorSentinel::reset();
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 16);
  const ParameterSet p = derive(1e-2, 2.0);
  for (int i = 0; i < 5; ++i)
    reduced_energy(Magnetization2D::random_unit(mask, 40 + i), p);
  CHECK(EnergyFloorSentinel::violations() == 0);
  CHECK(EnergyFloorSentinel::worst_margin() > 0.0);
}
