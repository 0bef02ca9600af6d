#include "latstat/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace latstat {

double Vec2::norm() const { return std::hypot(x, y); }

Mat2 Mat2::operator*(const Mat2& o) const {
  return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
          a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
}

Vec2 operator*(Vec2 p, const Mat2& m) {
  return {p.x * m.a11 + p.y * m.a21, p.x * m.a12 + p.y * m.a22};
}

bool is_unimodular(const Mat2& m, double tol) {
  const double scale = std::max(1.0, std::abs(m.a11 * m.a22) + std::abs(m.a12 * m.a21));
  return std::isfinite(m.det()) && std::abs(m.det() - 1.0) <= tol * scale;
}

AffineMap::AffineMap(const Mat2& m, Vec2 t) : m_(m), t_(t) {
  if (!is_unimodular(m)) {
    throw std::invalid_argument("AffineMap: determinant " + std::to_string(m.det()) +
                                " is not 1");
  }
}

AffineMap compose(const AffineMap& g, const AffineMap& h) {
  return AffineMap(g.m() * h.m(), g.t() * h.m() + h.t());
}

Vec2 act(Vec2 p, const AffineMap& g) { return p * g.m() + g.t(); }

namespace {

Mat2 inverse_matrix(const Mat2& m) {
  const double d = m.det();
  return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

}  // namespace

AffineMap inverse(const AffineMap& g) {
  const Mat2 mi = inverse_matrix(g.m());
  return AffineMap(mi, -(g.t() * mi));
}

AffineMap dilation(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::invalid_argument("dilation: T must be positive");
  }
  const double r = std::sqrt(T);
  return AffineMap::linear({1.0 / r, 0.0, 0.0, r});
}

AffineMap rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return AffineMap::linear({c, -s, s, c});
}

AffineMap shear(double xi) { return AffineMap({1.0, 2.0 * xi, 0.0, 1.0}, {-xi, -xi * xi}); }

bool approx_equal(const AffineMap& a, const AffineMap& b, double tol) {
  const Mat2& p = a.m();
  const Mat2& q = b.m();
  return std::abs(p.a11 - q.a11) <= tol && std::abs(p.a12 - q.a12) <= tol &&
         std::abs(p.a21 - q.a21) <= tol && std::abs(p.a22 - q.a22) <= tol &&
         std::abs(a.t().x - b.t().x) <= tol && std::abs(a.t().y - b.t().y) <= tol;
}

// ---------------------------------------------------------------------------

Region::Region(Rect r) : shape_(r) {
  if (!(r.xmin < r.xmax) || !(r.ymin < r.ymax)) {
    throw std::invalid_argument("Rect: require xmin < xmax and ymin < ymax");
  }
}

Region::Region(Disk d) : shape_(d) {
  if (!(d.radius > 0.0) || !std::isfinite(d.radius)) {
    throw std::invalid_argument("Disk: radius must be positive");
  }
}

Region::Region(EmTriangle t) : shape_(t) {
  if (!(t.sigma > 0.0) || !std::isfinite(t.sigma)) {
    throw std::invalid_argument("EmTriangle: sigma must be positive");
  }
}

Region Region::clip(HalfPlane side, Region inner) {
  return Region(Variant(std::make_shared<const HalfClip>(HalfClip{side, std::move(inner)})));
}

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

bool on_side(HalfPlane side, double x) { return side == HalfPlane::kRight ? x >= 0.0 : x < 0.0; }

// Area of {(x, y) in disk : x >= c} for a disk centred at x0.
double disk_area_right_of(const Disk& d, double c) {
  const double r = d.radius;
  const double h = c - d.center.x;
  if (h <= -r) return std::numbers::pi * r * r;
  if (h >= r) return 0.0;
  return r * r * std::acos(h / r) - h * std::sqrt(r * r - h * h);
}

}  // namespace

bool Region::contains(Vec2 p) const {
  return std::visit(
      overloaded{
          [&](const Rect& r) {
            return p.x >= r.xmin && p.x <= r.xmax && p.y >= r.ymin && p.y <= r.ymax;
          },
          [&](const Disk& d) {
            const double dx = p.x - d.center.x;
            const double dy = p.y - d.center.y;
            return dx * dx + dy * dy <= d.radius * d.radius;
          },
          [&](const EmTriangle& t) { return p.x > 0.0 && p.x < 1.0 && std::abs(p.y) <= t.sigma * p.x; },
          [&](const std::shared_ptr<const HalfClip>& c) {
            return on_side(c->side, p.x) && c->inner.contains(p);
          }},
      shape_);
}

Rect Region::bounding_box() const {
  return std::visit(
      overloaded{[](const Rect& r) { return r; },
                 [](const Disk& d) {
                   return Rect{d.center.x - d.radius, d.center.x + d.radius,
                               d.center.y - d.radius, d.center.y + d.radius};
                 },
                 [](const EmTriangle& t) { return Rect{0.0, 1.0, -t.sigma, t.sigma}; },
                 [](const std::shared_ptr<const HalfClip>& c) {
                   Rect b = c->inner.bounding_box();
                   if (c->side == HalfPlane::kRight) {
                     b.xmin = std::max(b.xmin, 0.0);
                   } else {
                     b.xmax = std::min(b.xmax, 0.0);
                   }
                   return b;
                 }},
      shape_);
}

bool Region::empty() const {
  if (const auto* c = std::get_if<std::shared_ptr<const HalfClip>>(&shape_)) {
    if ((*c)->inner.empty()) return true;
    const Rect b = (*c)->inner.bounding_box();
    return (*c)->side == HalfPlane::kRight ? b.xmax < 0.0 : b.xmin >= 0.0;
  }
  return false;
}

double Region::area() const {
  return std::visit(
      overloaded{[](const Rect& r) { return (r.xmax - r.xmin) * (r.ymax - r.ymin); },
                 [](const Disk& d) { return std::numbers::pi * d.radius * d.radius; },
                 [](const EmTriangle& t) { return t.sigma; },
                 [](const std::shared_ptr<const HalfClip>& c) -> double {
                   const auto& inner = c->inner.shape();
                   const bool right = c->side == HalfPlane::kRight;
                   if (const auto* r = std::get_if<Rect>(&inner)) {
                     const double lo = right ? std::max(r->xmin, 0.0) : r->xmin;
                     const double hi = right ? r->xmax : std::min(r->xmax, 0.0);
                     return std::max(0.0, hi - lo) * (r->ymax - r->ymin);
                   }
                   if (const auto* d = std::get_if<Disk>(&inner)) {
                     const double a = disk_area_right_of(*d, 0.0);
                     return right ? a : std::numbers::pi * d->radius * d->radius - a;
                   }
                   if (const auto* t = std::get_if<EmTriangle>(&inner)) {
                     return right ? t->sigma : 0.0;
                   }
                   throw std::invalid_argument("area: nested half-plane clips unsupported");
                 }},
      shape_);
}

double Region::boundary_distance(Vec2 p) const {
  if (!contains(p)) return 0.0;
  return std::visit(
      overloaded{[&](const Rect& r) {
                   return std::min({p.x - r.xmin, r.xmax - p.x, p.y - r.ymin, r.ymax - p.y});
                 },
                 [&](const Disk& d) { return d.radius - (p - d.center).norm(); },
                 [&](const EmTriangle& t) {
                   const double slant = (t.sigma * p.x - std::abs(p.y)) / std::hypot(1.0, t.sigma);
                   return std::min({p.x, 1.0 - p.x, slant});
                 },
                 [&](const std::shared_ptr<const HalfClip>& c) {
                   return std::min(std::abs(p.x), c->inner.boundary_distance(p));
                 }},
      shape_);
}

Region negate(const Region& region) {
  return std::visit(
      overloaded{[](const Rect& r) { return Region(Rect{-r.xmax, -r.xmin, -r.ymax, -r.ymin}); },
                 [](const Disk& d) { return Region(Disk{-d.center, d.radius}); },
                 [](const auto&) -> Region {
                   throw std::invalid_argument("negate: only rectangles and disks are supported");
                 }},
      region.shape());
}

// ---------------------------------------------------------------------------

namespace {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool empty() const { return lo > hi; }
};

// Restrict the interval of w so that lo <= base + coef * w <= hi.
void constrain(Interval& iv, double base, double coef, double lo, double hi) {
  if (coef == 0.0) {
    if (base < lo || base > hi) iv.lo = 1.0, iv.hi = 0.0;
    return;
  }
  double a = (lo - base) / coef;
  double b = (hi - base) / coef;
  if (a > b) std::swap(a, b);
  iv.lo = std::max(iv.lo, a);
  iv.hi = std::min(iv.hi, b);
}

template <class Visit>
void scan_lattice(const AffineMap& g, Vec2 offset, const Region& region, bool negate, Visit&& visit) {
  const Mat2& M = g.m();
  const double d = M.det();
  if (!std::isfinite(d) || std::abs(d) < 1e-12) {
    throw std::invalid_argument("enumerate_affine_lattice: singular matrix");
  }
  if (region.empty()) return;
  const double s = negate ? -1.0 : 1.0;
  const Rect box = region.bounding_box();
  const Mat2 Mi = inverse_matrix(M);
  const Vec2 t = g.t();

  // Preimage of the box corners in lattice coordinates (m, n) + offset.
  double ulo = std::numeric_limits<double>::infinity(), uhi = -ulo;
  double vlo = ulo, vhi = -ulo;
  for (double cx : {box.xmin, box.xmax}) {
    for (double cy : {box.ymin, box.ymax}) {
      const Vec2 w = (Vec2{cx, cy} * s - t) * Mi;
      ulo = std::min(ulo, w.x), uhi = std::max(uhi, w.x);
      vlo = std::min(vlo, w.y), vhi = std::max(vhi, w.y);
    }
  }
  const bool outer_is_m = (uhi - ulo) <= (vhi - vlo);
  const double olo = outer_is_m ? ulo - offset.x : vlo - offset.y;
  const double ohi = outer_is_m ? uhi - offset.x : vhi - offset.y;
  const auto first = static_cast<std::int64_t>(std::floor(olo)) - 1;
  const auto last = static_cast<std::int64_t>(std::ceil(ohi)) + 1;

  // Plane coordinates are s * (base + coef * inner) per axis.
  for (std::int64_t k = first; k <= last; ++k) {
    double bx, by, cx, cy;
    if (outer_is_m) {
      const double u = static_cast<double>(k) + offset.x;
      bx = u * M.a11 + offset.y * M.a21 + t.x;
      by = u * M.a12 + offset.y * M.a22 + t.y;
      cx = M.a21, cy = M.a22;
    } else {
      const double v = static_cast<double>(k) + offset.y;
      bx = offset.x * M.a11 + v * M.a21 + t.x;
      by = offset.x * M.a12 + v * M.a22 + t.y;
      cx = M.a11, cy = M.a12;
    }
    Interval iv;
    constrain(iv, s * bx, s * cx, box.xmin, box.xmax);
    constrain(iv, s * by, s * cy, box.ymin, box.ymax);
    if (iv.empty()) continue;
    const auto jlo = static_cast<std::int64_t>(std::floor(iv.lo)) - 1;
    const auto jhi = static_cast<std::int64_t>(std::ceil(iv.hi)) + 1;
    for (std::int64_t j = jlo; j <= jhi; ++j) {
      const std::int64_t m = outer_is_m ? k : j;
      const std::int64_t n = outer_is_m ? j : k;
      const Vec2 p = lattice_point(g, offset, m, n, negate);
      if (region.contains(p)) visit(m, n, p);
    }
  }
}

}  // namespace

Vec2 lattice_point(const AffineMap& g, Vec2 offset, std::int64_t m, std::int64_t n, bool negate) {
  const Vec2 w{static_cast<double>(m) + offset.x, static_cast<double>(n) + offset.y};
  const Vec2 p = w * g.m() + g.t();
  return negate ? -p : p;
}

std::vector<LatticePoint> enumerate_affine_lattice(const AffineMap& g, Vec2 offset,
                                                   const Region& region, bool negate) {
  std::vector<LatticePoint> out;
  scan_lattice(g, offset, region, negate,
               [&](std::int64_t m, std::int64_t n, Vec2 p) { out.push_back({m, n, p}); });
  std::sort(out.begin(), out.end(), [](const LatticePoint& a, const LatticePoint& b) {
    return a.m != b.m ? a.m < b.m : a.n < b.n;
  });
  return out;
}

std::size_t count_affine_lattice(const AffineMap& g, Vec2 offset, const Region& region,
                                 bool negate) {
  std::size_t count = 0;
  scan_lattice(g, offset, region, negate, [&](std::int64_t, std::int64_t, Vec2) { ++count; });
  return count;
}

}  // namespace latstat
