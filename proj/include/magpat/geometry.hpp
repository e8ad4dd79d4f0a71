#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace magpat {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

enum class ShapeKind : std::uint32_t { disk = 0, rectangle = 1, convex_polygon = 2 };

/// Continuous description of the convex planar sample. All geometric
/// quantities consumed by the bound checkers (perimeter, diameter, boundary
/// distance) are computed from this description, not from the raster, to
/// avoid staircase bias.
class Shape {
 public:
  Shape() = default;  // placeholder; use the factories for meaningful shapes

  static Shape disk(Vec2 center, double radius);
  static Shape rectangle(Vec2 lo, Vec2 hi);
  /// Vertices are normalized to counterclockwise order; a cross-product
  /// convexity check rejects nonconvex input.
  static Shape convex_polygon(std::vector<Vec2> vertices);

  ShapeKind kind() const { return kind_; }
  Vec2 center() const { return center_; }
  double radius() const { return radius_; }
  Vec2 lo() const { return lo_; }
  Vec2 hi() const { return hi_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  double area() const;
  double perimeter() const;
  double diameter() const;

  /// Distance to the boundary, positive inside. Exact for interior points;
  /// for exterior points only the sign is guaranteed.
  double boundary_distance(Vec2 p) const;

  /// Distance from an interior point to the boundary along direction
  /// (cos theta, sin theta). The ray exits a convex shape exactly once.
  double ray_exit_distance(Vec2 p, double theta) const;

  Vec2 bbox_lo() const;
  Vec2 bbox_hi() const;

  std::vector<double> pack_params() const;
  static Shape unpack(ShapeKind kind, const std::vector<double>& params);
  std::string describe() const;

 private:
  ShapeKind kind_ = ShapeKind::disk;
  Vec2 center_;
  double radius_ = 0.0;
  Vec2 lo_, hi_;
  std::vector<Vec2> vertices_;
};

struct GridSpec {
  Vec2 origin;  // lower-left corner of cell (0, 0)
  double h = 0.0;
  int nx = 0;
  int ny = 0;
};

struct BoundarySample {
  Vec2 point;
  Vec2 normal;  // outward unit normal
  double weight;  // arc length carried by the sample
};

/// The sample domain as a masked uniform grid. A cell belongs to the mask
/// iff its center lies strictly inside the continuous shape (and at
/// distance >= inset from the boundary for eroded masks, < collar for
/// collar masks). Immutable after construction.
class DomainMask {
 public:
  static DomainMask build(const Shape& shape, double h, int pad_cells = 1);
  static DomainMask rasterize(const Shape& shape, const GridSpec& grid);

  const Shape& shape() const { return shape_; }
  const GridSpec& grid() const { return grid_; }
  double grid_spacing() const { return grid_.h; }

  std::size_t cell_count() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  /// Compact cell index for (ix, iy), or -1 when outside.
  std::int32_t compact_index(int ix, int iy) const;
  bool inside(int ix, int iy) const { return compact_index(ix, iy) >= 0; }
  std::pair<int, int> cell(std::size_t k) const { return cells_[k]; }
  Vec2 cell_center(std::size_t k) const { return centers_[k]; }
  const std::vector<Vec2>& centers() const { return centers_; }
  /// Analytic distance from the cell center to the continuous boundary.
  double boundary_distance(std::size_t k) const { return dist_[k]; }

  /// h^2 times the number of cells; throws "degenerate domain" when empty.
  double area() const;
  /// Same measure without the emptiness guard (internal bookkeeping).
  double raster_area() const;

  /// Analytic perimeter/diameter of the continuous shape; only available
  /// on plain masks (not erosions or collars).
  double perimeter() const;
  double diameter() const;

  /// Cells whose center is at distance >= R from the boundary.
  DomainMask erode(double R) const;
  /// Cells inside at distance < delta from the boundary.
  DomainMask boundary_collar(double delta) const;

  bool is_plain() const { return inset_ == 0.0 && collar_ < 0.0; }
  double inset() const { return inset_; }

  bool same_raster(const DomainMask& other) const;

  /// Uniformly spaced samples of the continuous boundary with outward
  /// normals and arc-length weights.
  std::vector<BoundarySample> boundary_samples(double target_spacing) const;

  /// Compact index of the inside cell nearest to p (search widens ring by
  /// ring); -1 if none within max_rings.
  std::int32_t nearest_inside_cell(Vec2 p, int max_rings = 8) const;

 private:
  DomainMask() = default;
  static DomainMask from_predicate(const Shape& shape, const GridSpec& grid,
                                   double inset, double collar);

  Shape shape_;
  GridSpec grid_;
  double inset_ = 0.0;   // erosion depth (0 for plain masks)
  double collar_ = -1.0; // collar width (< 0 when not a collar mask)
  std::vector<std::int32_t> index_;      // nx*ny, -1 outside
  std::vector<std::pair<int, int>> cells_;
  std::vector<Vec2> centers_;
  std::vector<double> dist_;
};

}  // namespace magpat
