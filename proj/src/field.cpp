#include "magpat/field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace magpat {

Magnetization2D::Magnetization2D(DomainMask mask)
    : mask_(std::move(mask)),
      m1_(mask_.cell_count(), 0.0),
      m2_(mask_.cell_count(), 0.0),
      m3_(mask_.cell_count(), 1.0) {}

Magnetization2D Magnetization2D::uniform(const DomainMask& mask, Vec3 dir) {
  const double n = std::sqrt(dir.x * dir.x + dir.y * dir.y + dir.z * dir.z);
  if (!(n > 0.0)) throw std::invalid_argument("zero direction");
  Magnetization2D m(mask);
  for (std::size_t k = 0; k < m.size(); ++k) {
    m.m1(k) = dir.x / n;
    m.m2(k) = dir.y / n;
    m.m3(k) = dir.z / n;
  }
  return m;
}

Magnetization2D Magnetization2D::random_unit(const DomainMask& mask,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Magnetization2D m(mask);
  for (std::size_t k = 0; k < m.size(); ++k) {
    double x, y, z, n;
    do {
      x = gauss(rng);
      y = gauss(rng);
      z = gauss(rng);
      n = std::sqrt(x * x + y * y + z * z);
    } while (n < 1e-12);
    m.m1(k) = x / n;
    m.m2(k) = y / n;
    m.m3(k) = z / n;
  }
  return m;
}

double Magnetization2D::max_norm_defect() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    const double n =
        std::sqrt(m1_[k] * m1_[k] + m2_[k] * m2_[k] + m3_[k] * m3_[k]);
    worst = std::max(worst, std::abs(n - 1.0));
  }
  return worst;
}

void Magnetization2D::validate(double tol) const {
  const double defect = max_norm_defect();
  if (defect > tol)
    throw std::runtime_error("unit-norm constraint violated: defect " +
                             std::to_string(defect));
}

Magnetization2D renormalize(const Magnetization2D& m) {
  Magnetization2D out = m;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double n = std::sqrt(m.m1(k) * m.m1(k) + m.m2(k) * m.m2(k) +
                               m.m3(k) * m.m3(k));
    if (n < 0.5)
      throw std::runtime_error("retraction error: |m| < 0.5 at a cell");
    out.m1(k) = m.m1(k) / n;
    out.m2(k) = m.m2(k) / n;
    out.m3(k) = m.m3(k) / n;
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'M', 'A', 'G', 'S', 'N', 'A', 'P', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_snapshot(const std::string& path, const Magnetization2D& field,
                   double epsilon, double Q) {
  const DomainMask& mask = field.mask();
  const GridSpec& g = mask.grid();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open snapshot file: " + path);

  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  const auto kind = static_cast<std::uint32_t>(mask.shape().kind());
  put(os, kind);
  const std::vector<double> params = mask.shape().pack_params();
  const auto nparams = static_cast<std::uint32_t>(params.size());
  put(os, nparams);
  for (double p : params) put(os, p);
  put(os, g.origin.x);
  put(os, g.origin.y);
  const auto nx = static_cast<std::uint32_t>(g.nx);
  const auto ny = static_cast<std::uint32_t>(g.ny);
  put(os, nx);
  put(os, ny);
  put(os, g.h);
  put(os, epsilon);
  put(os, Q);

  // Row-major (m1, m2, m3) triples over the full grid, zeros outside.
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::int32_t k = mask.compact_index(ix, iy);
      double v[3] = {0.0, 0.0, 0.0};
      if (k >= 0) {
        v[0] = field.m1(static_cast<std::size_t>(k));
        v[1] = field.m2(static_cast<std::size_t>(k));
        v[2] = field.m3(static_cast<std::size_t>(k));
      }
      os.write(reinterpret_cast<const char*>(v), sizeof(v));
    }
  }
  if (!os) throw std::runtime_error("snapshot write failed: " + path);
  os.close();

  nlohmann::json meta;
  meta["format"] = "magpat-field";
  meta["version"] = kVersion;
  meta["shape"] = {{"kind", kind}, {"params", params}};
  meta["grid"] = {{"origin", {g.origin.x, g.origin.y}},
                  {"nx", g.nx},
                  {"ny", g.ny},
                  {"h", g.h}};
  meta["epsilon"] = epsilon;
  meta["Q"] = Q;
  std::ofstream ms(path + ".json", std::ios::trunc);
  if (!ms) throw std::runtime_error("cannot open snapshot sidecar: " + path);
  ms << meta.dump(2) << "\n";
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot file: " + path);

  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a field snapshot: " + path);
  std::uint32_t version = 0;
  get(is, version);
  if (version != kVersion)
    throw std::runtime_error("unsupported snapshot version");
  std::uint32_t kind = 0, nparams = 0;
  get(is, kind);
  get(is, nparams);
  std::vector<double> params(nparams);
  for (auto& p : params) get(is, p);
  GridSpec g;
  get(is, g.origin.x);
  get(is, g.origin.y);
  std::uint32_t nx = 0, ny = 0;
  get(is, nx);
  get(is, ny);
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  get(is, g.h);
  double epsilon = 0.0, Q = 0.0;
  get(is, epsilon);
  get(is, Q);
  if (!is) throw std::runtime_error("truncated snapshot header: " + path);

  const Shape shape = Shape::unpack(static_cast<ShapeKind>(kind), params);
  DomainMask mask = DomainMask::rasterize(shape, g);
  Magnetization2D field(mask);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      double v[3];
      is.read(reinterpret_cast<char*>(v), sizeof(v));
      const std::int32_t k = mask.compact_index(ix, iy);
      if (k >= 0) {
        field.m1(static_cast<std::size_t>(k)) = v[0];
        field.m2(static_cast<std::size_t>(k)) = v[1];
        field.m3(static_cast<std::size_t>(k)) = v[2];
      }
    }
  }
  if (!is) throw std::runtime_error("truncated snapshot payload: " + path);
  return Snapshot{std::move(field), epsilon, Q};
}

}  // namespace magpat
