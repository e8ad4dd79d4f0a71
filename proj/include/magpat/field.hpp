#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magpat/geometry.hpp"

namespace magpat {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Unit-sphere-valued magnetization on the inside cells of a mask, zero
/// outside. Stored as structure-of-arrays; the nonlocal sums only touch
/// the third component.
class Magnetization2D {
 public:
  explicit Magnetization2D(DomainMask mask);

  static Magnetization2D uniform(const DomainMask& mask, Vec3 direction);
  static Magnetization2D random_unit(const DomainMask& mask, std::uint64_t seed);

  const DomainMask& mask() const { return mask_; }
  std::size_t size() const { return m1_.size(); }

  double& m1(std::size_t k) { return m1_[k]; }
  double& m2(std::size_t k) { return m2_[k]; }
  double& m3(std::size_t k) { return m3_[k]; }
  double m1(std::size_t k) const { return m1_[k]; }
  double m2(std::size_t k) const { return m2_[k]; }
  double m3(std::size_t k) const { return m3_[k]; }

  std::vector<double>& m1() { return m1_; }
  std::vector<double>& m2() { return m2_; }
  std::vector<double>& m3() { return m3_; }
  const std::vector<double>& m1() const { return m1_; }
  const std::vector<double>& m2() const { return m2_; }
  const std::vector<double>& m3() const { return m3_; }

  /// Largest deviation of |m| from 1 over the mask.
  double max_norm_defect() const;
  /// Throws when the unit-norm constraint is violated beyond tol.
  void validate(double tol = 1e-10) const;

 private:
  DomainMask mask_;
  std::vector<double> m1_, m2_, m3_;
};

/// Per-cell division by |m|; throws a retraction error when any |m| < 0.5.
Magnetization2D renormalize(const Magnetization2D& m);

struct Snapshot {
  Magnetization2D field;
  double epsilon = 0.0;
  double Q = 0.0;
};

/// Flat binary field snapshot (bit-exact round trip) plus a JSON sidecar
/// with the same metadata at path + ".json".
void save_snapshot(const std::string& path, const Magnetization2D& field,
                   double epsilon, double Q);
Snapshot load_snapshot(const std::string& path);

}  // namespace magpat
