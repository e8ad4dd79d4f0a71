#include "magpat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace magpat {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Shape Shape::disk(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be > 0");
  Shape s;
  s.kind_ = ShapeKind::disk;
  s.center_ = center;
  s.radius_ = radius;
  return s;
}

Shape Shape::rectangle(Vec2 lo, Vec2 hi) {
  if (!(hi.x > lo.x && hi.y > lo.y))
    throw std::invalid_argument("rectangle extents must be positive");
  Shape s;
  s.kind_ = ShapeKind::rectangle;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

Shape Shape::convex_polygon(std::vector<Vec2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  // Signed area; flip to counterclockwise if needed.
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[(i + 1) % n];
    area2 += cross(a, b);
  }
  if (area2 == 0.0) throw std::invalid_argument("degenerate polygon");
  if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());
  // Convexity: all consecutive edge cross products nonnegative.
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[(i + 1) % n];
    const Vec2 c = vertices[(i + 2) % n];
    if (cross(b - a, c - b) < 0.0)
      throw std::invalid_argument("polygon is not convex");
  }
  Shape s;
  s.kind_ = ShapeKind::convex_polygon;
  s.vertices_ = std::move(vertices);
  return s;
}

double Shape::area() const {
  switch (kind_) {
    case ShapeKind::disk:
      return kPi * radius_ * radius_;
    case ShapeKind::rectangle:
      return (hi_.x - lo_.x) * (hi_.y - lo_.y);
    case ShapeKind::convex_polygon: {
      double a2 = 0.0;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i)
        a2 += cross(vertices_[i], vertices_[(i + 1) % n]);
      return 0.5 * a2;
    }
  }
  return 0.0;
}

double Shape::perimeter() const {
  switch (kind_) {
    case ShapeKind::disk:
      return 2.0 * kPi * radius_;
    case ShapeKind::rectangle:
      return 2.0 * ((hi_.x - lo_.x) + (hi_.y - lo_.y));
    case ShapeKind::convex_polygon: {
      double p = 0.0;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i)
        p += norm(vertices_[(i + 1) % n] - vertices_[i]);
      return p;
    }
  }
  return 0.0;
}

double Shape::diameter() const {
  switch (kind_) {
    case ShapeKind::disk:
      return 2.0 * radius_;
    case ShapeKind::rectangle:
      return norm(hi_ - lo_);
    case ShapeKind::convex_polygon: {
      // Max pairwise vertex distance; for convex input this equals the
      // rotating-calipers diameter.
      double best = 0.0;
      for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
          best = std::max(best, norm(vertices_[j] - vertices_[i]));
      return best;
    }
  }
  return 0.0;
}

double Shape::boundary_distance(Vec2 p) const {
  switch (kind_) {
    case ShapeKind::disk:
      return radius_ - norm(p - center_);
    case ShapeKind::rectangle:
      return std::min(std::min(p.x - lo_.x, hi_.x - p.x),
                      std::min(p.y - lo_.y, hi_.y - p.y));
    case ShapeKind::convex_polygon: {
      // Min signed distance to the edge lines (counterclockwise order puts
      // the interior on the positive side). Exact for interior points.
      double d = kInf;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices_[i];
        const Vec2 b = vertices_[(i + 1) % n];
        const Vec2 e = b - a;
        d = std::min(d, cross(e, p - a) / norm(e));
      }
      return d;
    }
  }
  return -kInf;
}

double Shape::ray_exit_distance(Vec2 p, double theta) const {
  const Vec2 dir{std::cos(theta), std::sin(theta)};
  switch (kind_) {
    case ShapeKind::disk: {
      const Vec2 q = p - center_;
      const double b = dot(q, dir);
      const double c = dot(q, q) - radius_ * radius_;
      const double disc = b * b - c;
      if (disc < 0.0 || c > 0.0)
        throw std::domain_error("ray origin outside the disk");
      return -b + std::sqrt(disc);
    }
    case ShapeKind::rectangle: {
      double s = kInf;
      if (dir.x > 0.0) s = std::min(s, (hi_.x - p.x) / dir.x);
      if (dir.x < 0.0) s = std::min(s, (lo_.x - p.x) / dir.x);
      if (dir.y > 0.0) s = std::min(s, (hi_.y - p.y) / dir.y);
      if (dir.y < 0.0) s = std::min(s, (lo_.y - p.y) / dir.y);
      return std::max(s, 0.0);
    }
    case ShapeKind::convex_polygon: {
      double s = kInf;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices_[i];
        const Vec2 b = vertices_[(i + 1) % n];
        const Vec2 e = b - a;
        const double denom = cross(dir, e);
        if (denom == 0.0) continue;
        const double t = cross(a - p, e) / denom;       // along the ray
        const double u = cross(a - p, dir) / denom;     // along the edge
        if (t > 0.0 && u >= -1e-12 && u <= 1.0 + 1e-12) s = std::min(s, t);
      }
      if (s == kInf) throw std::domain_error("ray does not exit the polygon");
      return s;
    }
  }
  return 0.0;
}

Vec2 Shape::bbox_lo() const {
  switch (kind_) {
    case ShapeKind::disk:
      return {center_.x - radius_, center_.y - radius_};
    case ShapeKind::rectangle:
      return lo_;
    case ShapeKind::convex_polygon: {
      Vec2 lo{kInf, kInf};
      for (const Vec2& v : vertices_) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
      }
      return lo;
    }
  }
  return {};
}

Vec2 Shape::bbox_hi() const {
  switch (kind_) {
    case ShapeKind::disk:
      return {center_.x + radius_, center_.y + radius_};
    case ShapeKind::rectangle:
      return hi_;
    case ShapeKind::convex_polygon: {
      Vec2 hi{-kInf, -kInf};
      for (const Vec2& v : vertices_) {
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
      }
      return hi;
    }
  }
  return {};
}

std::vector<double> Shape::pack_params() const {
  switch (kind_) {
    case ShapeKind::disk:
      return {center_.x, center_.y, radius_};
    case ShapeKind::rectangle:
      return {lo_.x, lo_.y, hi_.x, hi_.y};
    case ShapeKind::convex_polygon: {
      std::vector<double> p;
      p.reserve(2 * vertices_.size());
      for (const Vec2& v : vertices_) {
        p.push_back(v.x);
        p.push_back(v.y);
      }
      return p;
    }
  }
  return {};
}

Shape Shape::unpack(ShapeKind kind, const std::vector<double>& params) {
  switch (kind) {
    case ShapeKind::disk:
      if (params.size() != 3) throw std::invalid_argument("bad disk params");
      return disk({params[0], params[1]}, params[2]);
    case ShapeKind::rectangle:
      if (params.size() != 4) throw std::invalid_argument("bad rectangle params");
      return rectangle({params[0], params[1]}, {params[2], params[3]});
    case ShapeKind::convex_polygon: {
      if (params.size() < 6 || params.size() % 2 != 0)
        throw std::invalid_argument("bad polygon params");
      std::vector<Vec2> vs(params.size() / 2);
      for (std::size_t i = 0; i < vs.size(); ++i)
        vs[i] = {params[2 * i], params[2 * i + 1]};
      return convex_polygon(std::move(vs));
    }
  }
  throw std::invalid_argument("unknown shape kind");
}

std::string Shape::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ShapeKind::disk:
      os << "disk(r=" << radius_ << ",c=(" << center_.x << "," << center_.y
         << "))";
      break;
    case ShapeKind::rectangle:
      os << "rectangle([" << lo_.x << "," << hi_.x << "]x[" << lo_.y << ","
         << hi_.y << "])";
      break;
    case ShapeKind::convex_polygon:
      os << "polygon(n=" << vertices_.size() << ")";
      break;
  }
  return os.str();
}

DomainMask DomainMask::build(const Shape& shape, double h, int pad_cells) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
  const Vec2 lo = shape.bbox_lo();
  const Vec2 hi = shape.bbox_hi();
  GridSpec grid;
  grid.h = h;
  grid.origin = {lo.x - pad_cells * h, lo.y - pad_cells * h};
  grid.nx = static_cast<int>(std::ceil((hi.x - grid.origin.x) / h)) + pad_cells;
  grid.ny = static_cast<int>(std::ceil((hi.y - grid.origin.y) / h)) + pad_cells;
  DomainMask m = from_predicate(shape, grid, 0.0, -1.0);
  if (m.empty())
    throw std::invalid_argument("degenerate domain: no cell centers inside");
  return m;
}

DomainMask DomainMask::rasterize(const Shape& shape, const GridSpec& grid) {
  return from_predicate(shape, grid, 0.0, -1.0);
}

DomainMask DomainMask::from_predicate(const Shape& shape, const GridSpec& grid,
                                      double inset, double collar) {
  DomainMask m;
  m.shape_ = shape;
  m.grid_ = grid;
  m.inset_ = inset;
  m.collar_ = collar;
  m.index_.assign(static_cast<std::size_t>(grid.nx) * grid.ny, -1);
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Vec2 p{grid.origin.x + (ix + 0.5) * grid.h,
                   grid.origin.y + (iy + 0.5) * grid.h};
      const double d = shape.boundary_distance(p);
      bool in = d > 0.0;
      if (in && inset > 0.0) in = d >= inset;
      if (in && collar >= 0.0) in = d < collar;
      if (in) {
        m.index_[static_cast<std::size_t>(iy) * grid.nx + ix] =
            static_cast<std::int32_t>(m.cells_.size());
        m.cells_.emplace_back(ix, iy);
        m.centers_.push_back(p);
        m.dist_.push_back(d);
      }
    }
  }
  return m;
}

std::int32_t DomainMask::compact_index(int ix, int iy) const {
  if (ix < 0 || iy < 0 || ix >= grid_.nx || iy >= grid_.ny) return -1;
  return index_[static_cast<std::size_t>(iy) * grid_.nx + ix];
}

double DomainMask::area() const {
  if (empty()) throw std::runtime_error("degenerate domain");
  return raster_area();
}

double DomainMask::raster_area() const {
  return grid_.h * grid_.h * static_cast<double>(cells_.size());
}

double DomainMask::perimeter() const {
  if (!is_plain())
    throw std::logic_error("perimeter undefined for derived masks");
  return shape_.perimeter();
}

double DomainMask::diameter() const {
  if (!is_plain())
    throw std::logic_error("diameter undefined for derived masks");
  return shape_.diameter();
}

DomainMask DomainMask::erode(double R) const {
  if (R < 0.0) throw std::invalid_argument("erosion depth must be >= 0");
  if (collar_ >= 0.0) throw std::logic_error("cannot erode a collar mask");
  return from_predicate(shape_, grid_, inset_ + R, -1.0);
}

DomainMask DomainMask::boundary_collar(double delta) const {
  if (delta < 0.0) throw std::invalid_argument("collar width must be >= 0");
  if (!is_plain()) throw std::logic_error("collar of a derived mask");
  return from_predicate(shape_, grid_, 0.0, delta);
}

bool DomainMask::same_raster(const DomainMask& other) const {
  return grid_.nx == other.grid_.nx && grid_.ny == other.grid_.ny &&
         index_ == other.index_;
}

std::vector<BoundarySample> DomainMask::boundary_samples(
    double target_spacing) const {
  if (!(target_spacing > 0.0))
    throw std::invalid_argument("sample spacing must be > 0");
  std::vector<BoundarySample> out;
  const Shape& s = shape_;
  switch (s.kind()) {
    case ShapeKind::disk: {
      const double R = s.radius() - inset_;
      if (R <= 0.0) return out;
      const int n = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * R / target_spacing)));
      const double w = 2.0 * kPi * R / n;
      for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * (i + 0.5) / n;
        const Vec2 nrm{std::cos(th), std::sin(th)};
        out.push_back({s.center() + R * nrm, nrm, w});
      }
      break;
    }
    case ShapeKind::rectangle: {
      const Vec2 lo{s.lo().x + inset_, s.lo().y + inset_};
      const Vec2 hi{s.hi().x - inset_, s.hi().y - inset_};
      if (!(hi.x > lo.x && hi.y > lo.y)) return out;
      auto side = [&](Vec2 a, Vec2 b, Vec2 nrm) {
        const double len = norm(b - a);
        const int n = std::max(1, static_cast<int>(std::ceil(len / target_spacing)));
        const double w = len / n;
        for (int i = 0; i < n; ++i) {
          const double t = (i + 0.5) / n;
          out.push_back({a + t * (b - a), nrm, w});
        }
      };
      side({lo.x, lo.y}, {hi.x, lo.y}, {0.0, -1.0});
      side({hi.x, lo.y}, {hi.x, hi.y}, {1.0, 0.0});
      side({hi.x, hi.y}, {lo.x, hi.y}, {0.0, 1.0});
      side({lo.x, hi.y}, {lo.x, lo.y}, {-1.0, 0.0});
      break;
    }
    case ShapeKind::convex_polygon: {
      if (inset_ != 0.0)
        throw std::logic_error("boundary samples of an eroded polygon");
      const auto& vs = s.vertices();
      const std::size_t n = vs.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vs[i];
        const Vec2 b = vs[(i + 1) % n];
        const Vec2 e = b - a;
        const double len = norm(e);
        const Vec2 nrm{e.y / len, -e.x / len};  // outward for CCW order
        const int k = std::max(1, static_cast<int>(std::ceil(len / target_spacing)));
        const double w = len / k;
        for (int j = 0; j < k; ++j) {
          const double t = (j + 0.5) / k;
          out.push_back({a + t * e, nrm, w});
        }
      }
      break;
    }
  }
  return out;
}

std::int32_t DomainMask::nearest_inside_cell(Vec2 p, int max_rings) const {
  const double h = grid_.h;
  const int ix0 = static_cast<int>(std::floor((p.x - grid_.origin.x) / h));
  const int iy0 = static_cast<int>(std::floor((p.y - grid_.origin.y) / h));
  std::int32_t best = -1;
  double best_d2 = kInf;
  for (int ring = 0; ring <= max_rings; ++ring) {
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        const std::int32_t k = compact_index(ix0 + dx, iy0 + dy);
        if (k < 0) continue;
        const Vec2 c = centers_[static_cast<std::size_t>(k)];
        const double d2 = dot(c - p, c - p);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = k;
        }
      }
    }
    if (best >= 0 && ring > 0) break;  // one extra ring guards diagonal cases
  }
  return best;
}

}  // namespace magpat
