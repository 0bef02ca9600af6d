#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "latstat/haar.hpp"
#include "latstat/statistics.hpp"

using namespace latstat;

namespace {

IntMat2 mod4(const IntMat2& m) {
  auto r = [](std::int64_t v) { return ((v % 4) + 4) % 4; };
  return {r(m.a), r(m.b), r(m.c), r(m.d)};
}

bool residue_in_gamma(const IntMat2& m) {
  const IntMat2 r = mod4(m);
  return r == IntMat2{1, 0, 0, 1} || r == IntMat2{1, 2, 0, 1};
}

std::vector<Vec2> sorted(std::vector<Vec2> v) {
  std::sort(v.begin(), v.end(), [](Vec2 a, Vec2 b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
  return v;
}

bool same_points(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  const auto x = sorted(a), y = sorted(b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i].x - y[i].x) > tol || std::abs(x[i].y - y[i].y) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("orders of SL(2, Z/n)") {
  CHECK(enumerate_sl2_mod(2).size() == 6);
  CHECK(enumerate_sl2_mod(3).size() == 24);
  CHECK(enumerate_sl2_mod(4).size() == 48);
  CHECK_THROWS_AS(enumerate_sl2_mod(1), std::invalid_argument);
}

TEST_CASE("membership in the congruence subgroup") {
  CHECK(is_in_gamma({1, 0, 0, 1}));
  CHECK(is_in_gamma({1, 2, 0, 1}));
  CHECK(is_in_gamma({1, 4, 0, 1}));
  CHECK(is_in_gamma({5, 2, 12, 5}));
  CHECK_FALSE(is_in_gamma({-1, 0, 0, -1}));
  CHECK_FALSE(is_in_gamma({1, 1, 0, 1}));
  CHECK_FALSE(is_in_gamma({0, -1, 1, 0}));
  CHECK_THROWS_AS(is_in_gamma({2, 0, 0, 1}), std::invalid_argument);
}

TEST_CASE("coset table partitions SL(2, Z)") {
  const auto& reps = coset_table().reps;
  REQUIRE(reps.size() == kCosetCount);
  REQUIRE(reps.size() == 24);
  for (const auto& r : reps) CHECK(r.det() == 1);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = 0; j < reps.size(); ++j) {
      CHECK(residue_in_gamma(reps[i] * inverse(reps[j])) == (i == j));
    }
  }
  // Every residue class lands in exactly one coset.
  for (const auto& g : enumerate_sl2_mod(4)) {
    int hits = 0;
    for (const auto& r : reps) hits += residue_in_gamma(g * inverse(r)) ? 1 : 0;
    CHECK(hits == 1);
  }
  CHECK(build_coset_table().reps == reps);
}

TEST_CASE("frame matrix") {
  const Mat2 m = frame_to_matrix({0.5, 2.0, 0.0});
  CHECK(m.a11 == doctest::Approx(0.70710678118654752));
  CHECK(std::abs(m.a12) < 1e-15);
  CHECK(m.a21 == doctest::Approx(0.35355339059327376));
  CHECK(m.a22 == doctest::Approx(1.4142135623730950));
  CHECK(m.det() == doctest::Approx(1.0));
}

TEST_CASE("sampled frames lie in the fundamental domain") {
  Stream rng(2);
  for (int i = 0; i < 100000; ++i) {
    const auto f = sample_frame(rng);
    REQUIRE(std::abs(f.x) <= 0.5 + 1e-15);
    REQUIRE(f.x * f.x + f.y * f.y >= 1.0 - 1e-12);
    REQUIRE(f.phi >= 0.0);
    REQUIRE(f.phi < 2 * 3.1415926535897932 + 1e-12);
  }
  const auto corner = frame_from_uniforms(0.0, 1.0, 0.0);
  CHECK(corner.x == doctest::Approx(-0.5));
  CHECK(corner.y == doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("frame law agrees with a rejection sampler of dx dy / y^2") {
  // Oracle: uniform x on [-1/2, 1/2], 1/y uniform on [1/50, 2], rejecting x^2 + y^2 < 1.
  constexpr int kDraws = 100000;
  constexpr int kGrid = 10;
  auto cell = [](double x, double y) {
    const double u = 1.0 / y;  // in (0, 2/sqrt 3]
    const int i = std::min(kGrid - 1, static_cast<int>((x + 0.5) * kGrid));
    const int j = std::min(kGrid - 1, static_cast<int>((u - 0.02) / (1.0 / std::sqrt(0.75) - 0.02) * kGrid));
    return i * kGrid + j;
  };
  std::vector<std::int64_t> a(kGrid * kGrid, 0), b(kGrid * kGrid, 0);
  Stream s1(100), s2(200);
  for (int n = 0; n < kDraws;) {
    const auto f = sample_frame(s1);
    if (f.y > 50.0) continue;
    ++a[static_cast<std::size_t>(cell(f.x, f.y))];
    ++n;
  }
  for (int n = 0; n < kDraws;) {
    const double x = s2.uniform() - 0.5;
    const double y = 1.0 / (0.02 + 1.98 * s2.uniform());
    if (x * x + y * y < 1.0) continue;
    ++b[static_cast<std::size_t>(cell(x, y))];
    ++n;
  }
  const auto chi = chi_square_two_sample(a, b);
  INFO("chi2 = " << chi.statistic << " dof = " << chi.dof);
  CHECK(chi.p_value > 0.01);
}

TEST_CASE("translation part and coset index are uniform") {
  constexpr int kDraws = 100000;
  std::vector<std::int64_t> grid(100, 0), cosets(kCosetCount, 0);
  Stream rng(77);
  for (int i = 0; i < kDraws; ++i) {
    const auto s = sample_Y(rng);
    REQUIRE(s.trans.x >= 0.0);
    REQUIRE(s.trans.x < 1.0);
    ++grid[static_cast<std::size_t>(static_cast<int>(s.trans.x * 10) * 10 + static_cast<int>(s.trans.y * 10))];
    ++cosets[s.coset];
  }
  CHECK(chi_square_gof(grid, std::vector<double>(100, 0.01)).p_value > 0.01);
  CHECK(chi_square_gof(cosets, std::vector<double>(kCosetCount, 1.0 / kCosetCount)).p_value > 0.01);
}

TEST_CASE("sampled elements are unimodular and decompose as documented") {
  Stream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto s = sample_Y(rng);
    CHECK(s.g.m().det() == doctest::Approx(1.0).epsilon(1e-9));
    const Mat2 m = coset_table().reps[s.coset].to_real() * frame_to_matrix(s.frame);
    const Vec2 t = s.trans * m;
    CHECK(s.g.t().x == doctest::Approx(t.x));
    CHECK(s.g.t().y == doctest::Approx(t.y));
  }
  CHECK_THROWS_AS(make_sample({}, 24, {}), std::invalid_argument);
}

TEST_CASE("realizations do not depend on the coset representative") {
  Stream rng(13);
  const Region region(Rect{-2, 2, -2, 2});
  const std::vector<IntMat2> gens{{1, 2, 0, 1}, {1, 0, 4, 1}, {1, -2, 0, 1}, {5, 2, 12, 5}};
  for (int i = 0; i < 20; ++i) {
    const auto s = sample_Y(rng);
    const auto xi = realize_xi(s, region, false);
    const auto xit = realize_xi(s, region, true);
    const auto th = theta_points(s.g, region);
    for (const auto& gamma : gens) {
      const AffineMap lift(gamma.to_real(), {static_cast<double>(i % 3) - 1.0, 2.0});
      AffineSample moved = s;
      moved.g = compose(lift, s.g);
      CHECK(is_in_gamma(gamma));
      CHECK(same_points(realize_xi(moved, region, false), xi));
      CHECK(same_points(realize_xi(moved, region, true), xit));
      CHECK(same_points(theta_points(moved.g, region), th));
    }
  }
}

TEST_CASE("realization invariants") {
  Stream rng(19);
  for (int i = 0; i < 200; ++i) {
    const auto s = sample_Y(rng);
    const Region straddle(Rect{-1.5, 1.5, -1, 1});
    const auto r = realize_theta(s, straddle);
    CHECK(verify_realization(r));
    CHECK(r.points.size() == theta_count(s.g, straddle));
    for (Vec2 p : r.points) CHECK(straddle.contains(p));

    const Region right(Rect{0.0, 1.5, -1, 1});
    CHECK(same_points(theta_points(s.g, right), realize_xi(s, right, false)));

    // The two halves differ by the offset (1/2, -1/4) and a sign.
    for (Vec2 p : realize_xi(s, straddle, true)) {
      CHECK(on_affine_lattice(-p, s.g, kHalfShift, false));
      CHECK_FALSE(on_affine_lattice(-p, s.g, {0, 0}, false));
    }
  }
}

TEST_CASE("points on the vertical axis belong to the right lattice") {
  // g = identity puts (0, n) on the axis.
  const auto pts = theta_points(AffineMap::identity(), Region(Rect{-0.1, 0.1, -2.5, 2.5}));
  CHECK(pts.size() == 5);
  for (Vec2 p : pts) CHECK(p.x == 0.0);
}

TEST_CASE("intensity is Lebesgue measure") {
  const std::vector<Region> regions{Region(Rect{-1, 1, -1, 1}), Region(Rect{0.2, 1.2, 0, 1}),
                                    Region(Rect{-1.2, -0.2, 0, 1}), Region(Rect{-0.5, 0.7, -0.4, 1.1}),
                                    Region(Disk{{0.1, 0.2}, 0.9})};
  for (std::size_t k = 0; k < regions.size(); ++k) {
    std::vector<double> counts;
    for (std::uint64_t r = 0; r < 10000; ++r) {
      Stream rng(1000 + k, r);
      counts.push_back(static_cast<double>(theta_count(sample_Y(rng).g, regions[k])));
    }
    const auto est = estimate_mean(counts);
    INFO("region " << k << " mean " << est.mean << " se " << est.se);
    CHECK(std::abs(est.mean - regions[k].area()) <= 3 * est.se);
  }
}

TEST_CASE("pairs across the axis have the Poisson mean") {
  const Region A(Rect{0.2, 1.2, 0, 1}), B(Rect{-1.2, -0.2, 0, 1});
  const Region both(Rect{-1.2, 1.2, 0, 1});
  std::vector<double> pairs;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    Stream rng(555, r);
    const auto pts = theta_points(sample_Y(rng).g, both);
    pairs.push_back(static_cast<double>(pair_count(pts, A, B)));
  }
  const auto est = estimate_mean(pairs);
  INFO("mean " << est.mean << " se " << est.se);
  CHECK(std::abs(est.mean - 1.0) <= 3 * est.se);
}

TEST_CASE("mean value formula for the shifted lattice") {
  std::vector<double> tall, unit;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    Stream rng(321, r);
    const auto s = sample_Y(rng);
    tall.push_back(static_cast<double>(count_affine_lattice(s.g, kHalfShift, Region(Rect{0, 1, 0, 2}))));
    unit.push_back(static_cast<double>(realize_xi(s, Region(Rect{0, 1, 0, 1}), true).size()));
  }
  const auto a = estimate_mean(tall), b = estimate_mean(unit);
  CHECK(std::abs(a.mean - 2.0) <= 3 * a.se);
  CHECK(std::abs(b.mean - 1.0) <= 3 * b.se);
}
