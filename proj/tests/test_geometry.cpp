#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "latstat/geometry.hpp"
#include "latstat/rng.hpp"

using namespace latstat;

namespace {

AffineMap random_element(Stream& rng) {
  const double T = std::exp(2.0 * rng.uniform() - 1.0);
  const AffineMap g = compose(compose(rotation(2 * std::numbers::pi * rng.uniform()), dilation(T)),
                              shear(rng.uniform() - 0.5));
  return compose(g, AffineMap::translation({2 * rng.uniform() - 1, 2 * rng.uniform() - 1}));
}

bool close(const Vec2& a, const Vec2& b, double tol = 1e-12) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol;
}

// Exhaustive search over a square of indices large enough to cover region.
std::vector<std::pair<std::int64_t, std::int64_t>> brute_force(const AffineMap& g, Vec2 offset, const Region& region,
                                                               bool negate) {
  const Rect box = region.bounding_box();
  const double reach = std::max({std::abs(box.xmin), std::abs(box.xmax), std::abs(box.ymin), std::abs(box.ymax)}) +
                       std::hypot(g.t().x, g.t().y);
  const Mat2& m = g.m();
  const double inv_norm = std::sqrt(m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22);
  const auto K = static_cast<std::int64_t>(std::ceil(reach * inv_norm * 1.5 + 3));
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t a = -K; a <= K; ++a) {
    for (std::int64_t b = -K; b <= K; ++b) {
      Vec2 p = Vec2{a + offset.x, b + offset.y} * m + g.t();
      if (negate) p = -p;
      if (region.contains(p)) out.emplace_back(a, b);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("affine group axioms hold for random elements") {
  Stream rng(11);
  for (int i = 0; i < 50; ++i) {
    const AffineMap a = random_element(rng), b = random_element(rng), c = random_element(rng);
    CHECK(approx_equal(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9));
    CHECK(approx_equal(compose(a, inverse(a)), AffineMap::identity(), 1e-9));
    CHECK(approx_equal(compose(inverse(a), a), AffineMap::identity(), 1e-9));
    CHECK(approx_equal(compose(a, AffineMap::identity()), a, 0.0));
    const Vec2 p{rng.uniform(), rng.uniform()};
    CHECK(close(act(p, compose(a, b)), act(act(p, a), b), 1e-9));
  }
}

TEST_CASE("action is p M + t on row vectors") {
  const AffineMap g({2.0, 1.0, 1.0, 1.0}, {0.5, -1.0});
  const Vec2 q = act({1.0, 2.0}, g);
  CHECK(q.x == doctest::Approx(1 * 2 + 2 * 1 + 0.5));
  CHECK(q.y == doctest::Approx(1 * 1 + 2 * 1 - 1.0));
}

TEST_CASE("non-unimodular matrices and bad dilations are rejected") {
  CHECK_THROWS_AS(AffineMap({2.0, 0.0, 0.0, 1.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(AffineMap({0.0, 0.0, 0.0, 0.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(dilation(0.0), std::invalid_argument);
  CHECK_THROWS_AS(dilation(-1.0), std::invalid_argument);
  // Extremely elongated but exact frames stay valid.
  CHECK_NOTHROW(dilation(1e8));
}

TEST_CASE("N is a homomorphism and D multiplies") {
  Stream rng(5);
  for (int i = 0; i < 100; ++i) {
    const double a = 2 * rng.uniform() - 1, b = 2 * rng.uniform() - 1;
    CHECK(approx_equal(compose(shear(a), shear(b)), shear(a + b), 1e-9));
    const double s = std::exp(rng.uniform()), t = std::exp(rng.uniform());
    CHECK(approx_equal(compose(dilation(s), dilation(t)), dilation(s * t), 1e-9));
  }
  CHECK(approx_equal(compose(rotation(0.3), rotation(0.4)), rotation(0.7), 1e-12));
  CHECK(approx_equal(rotation(std::numbers::pi), AffineMap::linear({-1, 0, 0, -1}), 1e-12));
}

TEST_CASE("half shift relates N(xi - 1/2) to the shifted lattice by an integral element") {
  // (I, (1/2, -1/4)) N(xi) N(xi - 1/2)^{-1} = (I, (1/2, -1/4)) N(1/2) must lie in SL(2,Z) x Z^2.
  Stream rng(17);
  for (int i = 0; i < 100; ++i) {
    const double xi = rng.uniform();
    const AffineMap b = compose(compose(AffineMap::translation({0.5, -0.25}), shear(xi)), inverse(shear(xi - 0.5)));
    const Mat2& m = b.m();
    for (double v : {m.a11, m.a12, m.a21, m.a22, b.t().x, b.t().y}) CHECK(std::abs(v - std::nearbyint(v)) < 1e-9);
    CHECK(m.det() == doctest::Approx(1.0));
  }
}

TEST_CASE("region membership conventions") {
  const Region rect(Rect{-1, 1, 0, 2});
  CHECK(rect.contains({1, 2}));
  CHECK(rect.contains({-1, 0}));
  CHECK_FALSE(rect.contains({1.0000001, 1}));
  CHECK(rect.area() == doctest::Approx(4.0));

  const Region disk(Disk{{0, 0}, 1});
  CHECK(disk.contains({1, 0}));
  CHECK(disk.area() == doctest::Approx(std::numbers::pi));

  const Region tri(EmTriangle{0.5});
  CHECK(tri.contains({0.5, 0.25}));
  CHECK_FALSE(tri.contains({0.0, 0.0}));
  CHECK_FALSE(tri.contains({1.0, 0.0}));
  CHECK(tri.area() == doctest::Approx(0.5));

  const Region right = Region::clip(HalfPlane::kRight, rect);
  const Region left = Region::clip(HalfPlane::kLeft, rect);
  CHECK(right.contains({0.0, 1.0}));
  CHECK_FALSE(left.contains({0.0, 1.0}));
  CHECK(left.contains({-0.5, 1.0}));
  CHECK(right.area() + left.area() == doctest::Approx(rect.area()));
  CHECK(Region::clip(HalfPlane::kLeft, Region(Rect{0.2, 1, 0, 1})).empty());

  const Region neg = negate(Region(Rect{0.2, 1.2, 0, 1}));
  CHECK(neg.contains({-1.0, -0.5}));
  CHECK_FALSE(neg.contains({1.0, 0.5}));
}

TEST_CASE("enumeration agrees with exhaustive search") {
  Stream rng(23);
  const std::vector<Region> regions{Region(Rect{-1, 1, -1, 1}), Region(Rect{0.2, 1.7, -0.3, 0.9}),
                                    Region(Disk{{0.3, -0.2}, 1.3}), Region(EmTriangle{0.7}),
                                    Region::clip(HalfPlane::kRight, Region(Rect{-1, 1, -1, 2})),
                                    Region::clip(HalfPlane::kLeft, Region(Disk{{0, 0}, 1.5}))};
  for (int i = 0; i < 40; ++i) {
    const AffineMap g = random_element(rng);
    const Vec2 offset{rng.uniform(), rng.uniform()};
    const bool neg = i % 2 == 1;
    for (const auto& region : regions) {
      const auto pts = enumerate_affine_lattice(g, offset, region, neg);
      const auto oracle = brute_force(g, offset, region, neg);
      REQUIRE(pts.size() == oracle.size());
      for (std::size_t k = 0; k < pts.size(); ++k) {
        CHECK(pts[k].m == oracle[k].first);
        CHECK(pts[k].n == oracle[k].second);
        CHECK(close(pts[k].p, lattice_point(g, offset, pts[k].m, pts[k].n, neg)));
        CHECK(region.contains(pts[k].p));
      }
      CHECK(count_affine_lattice(g, offset, region, neg) == pts.size());
    }
  }
}

TEST_CASE("enumeration handles strongly stretched lattices") {
  const AffineMap g = compose(shear(0.3141), dilation(1e6));
  const Region r(Rect{-1, 1, -1, 1});
  const auto pts = enumerate_affine_lattice(g, {0, 0}, r);
  for (const auto& lp : pts) CHECK(r.contains(lp.p));
  // Unit covolume: the count is near the area for a generic window.
  CHECK(pts.size() < 50);
}

TEST_CASE("identity lattice in the unit square") {
  const auto pts = enumerate_affine_lattice(AffineMap::identity(), {0, 0}, Region(Rect{0, 1, 0, 1}));
  REQUIRE(pts.size() == 4);
  CHECK(pts.front().m == 0);
  CHECK(pts.back().n == 1);
}
