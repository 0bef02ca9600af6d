#pragma once

// Affine group ASL(2,R) with row-vector conventions, bounded test regions and
// enumeration of affine lattice points inside them.
//
// Points are row vectors; (M, t) acts by p -> p M + t and composes as
// (M, t)(M', t') = (M M', t M' + t').

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace latstat {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;

  double norm() const;
};

struct Mat2 {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  static Mat2 identity() { return {}; }
  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 operator*(const Mat2& o) const;
  bool operator==(const Mat2&) const = default;
};

// Row vector times matrix.
Vec2 operator*(Vec2 p, const Mat2& m);

// Tolerance on |det - 1| for group elements, scaled by the size of the terms
// entering the determinant so that very elongated frames are not rejected
// for rounding alone.
inline constexpr double kDetTolerance = 1e-9;

bool is_unimodular(const Mat2& m, double tol = kDetTolerance);

class AffineMap {
 public:
  AffineMap() = default;
  // Throws std::invalid_argument unless |det(m) - 1| <= kDetTolerance.
  AffineMap(const Mat2& m, Vec2 t);

  static AffineMap identity() { return {}; }
  static AffineMap translation(Vec2 t) { return AffineMap(Mat2::identity(), t); }
  static AffineMap linear(const Mat2& m) { return AffineMap(m, {}); }

  const Mat2& m() const { return m_; }
  Vec2 t() const { return t_; }

 private:
  Mat2 m_{};
  Vec2 t_{};
};

AffineMap compose(const AffineMap& g, const AffineMap& h);
Vec2 act(Vec2 p, const AffineMap& g);
AffineMap inverse(const AffineMap& g);

// D(T) = diag(T^{-1/2}, T^{1/2}); throws for T <= 0.
AffineMap dilation(double T);
// k(theta) = ((cos, -sin), (sin, cos)).
AffineMap rotation(double theta);
// N(xi) = (((1, 2 xi), (0, 1)), (-xi, -xi^2)).
AffineMap shear(double xi);

bool approx_equal(const AffineMap& a, const AffineMap& b, double tol);

// ---------------------------------------------------------------------------
// Regions

struct Rect {
  double xmin, xmax, ymin, ymax;
};

struct Disk {
  Vec2 center;
  double radius;
};

// {(x, y) | 0 < x < 1, |y| <= sigma x}
struct EmTriangle {
  double sigma;
};

enum class HalfPlane { kRight, kLeft };

struct HalfClip;

// Bounded test set. HalfClip restricts to x >= 0 (kRight) or x < 0 (kLeft);
// points on the axis x = 0 belong to the right half only.
class Region {
 public:
  using Variant = std::variant<Rect, Disk, EmTriangle, std::shared_ptr<const HalfClip>>;

  Region(Rect r);
  Region(Disk d);
  Region(EmTriangle t);
  static Region clip(HalfPlane side, Region inner);

  const Variant& shape() const { return shape_; }

  bool contains(Vec2 p) const;
  Rect bounding_box() const;
  double area() const;
  // Distance from an interior point to the boundary (0 for exterior points).
  double boundary_distance(Vec2 p) const;
  // True when the region is provably empty (a clip whose inner box lies on
  // the wrong side of the axis).
  bool empty() const;

 private:
  explicit Region(Variant v) : shape_(std::move(v)) {}
  Variant shape_;
};

struct HalfClip {
  HalfPlane side;
  Region inner;
};

inline bool region_contains(const Region& region, Vec2 p) { return region.contains(p); }

Region negate(const Region& region);

// ---------------------------------------------------------------------------
// Lattice enumeration

struct LatticePoint {
  std::int64_t m;
  std::int64_t n;
  Vec2 p;
};

// All integer pairs (m, n) with s (((m, n) + offset) M + t) in region, where
// (M, t) = g and s = -1 when negate is set. Sorted lexicographically by (m, n).
// Throws std::invalid_argument for a singular matrix.
std::vector<LatticePoint> enumerate_affine_lattice(const AffineMap& g, Vec2 offset,
                                                   const Region& region, bool negate = false);

// Plane point of index (m, n) under the same convention.
Vec2 lattice_point(const AffineMap& g, Vec2 offset, std::int64_t m, std::int64_t n,
                   bool negate = false);

std::size_t count_affine_lattice(const AffineMap& g, Vec2 offset, const Region& region,
                                 bool negate = false);

}  // namespace latstat
