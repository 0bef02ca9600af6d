#include "latstat/spiral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "latstat/sequences.hpp"

namespace latstat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_angle(double theta) { return theta - kTwoPi * std::floor(theta / kTwoPi); }

Vec2 spiral_point_reduced(std::int64_t n, double sqrtT, double theta) {
  const double phi = kTwoPi * sqrt_frac(n) - theta;
  const double r = std::sqrt(static_cast<double>(n) / std::numbers::pi);
  return {r * std::cos(phi) / sqrtT, r * std::sin(phi) * sqrtT};
}

// Visits every n >= 1 whose point of P k(theta) D(T) lies in region, in
// increasing order. Only n near the directions 0 and pi (mod 2pi) can have
// |y| <= Y, so each block k^2 <= n < (k+1)^2 is searched in windows of
// half-width |sin| bound / 4 around sqrt n = theta/2pi + j/2.
template <class Visit>
void scan_theta_T(double T, double theta, const Region& region, Visit&& visit) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("theta_T_points: T must be positive");
  if (region.empty()) return;
  const Rect box = region.bounding_box();
  const double X = std::max(std::abs(box.xmin), std::abs(box.xmax));
  const double Y = std::max(std::abs(box.ymin), std::abs(box.ymax));
  const double bound = std::ceil(std::numbers::pi * T * X * X + std::numbers::pi * Y * Y / T);
  if (bound < 1.0) return;
  if (bound > 9.0e15) throw std::invalid_argument("theta_T_points: search bound too large");
  const auto n_max = static_cast<std::int64_t>(bound);
  const double th = reduce_angle(theta);
  const double sqrtT = std::sqrt(T);
  const double c0 = th / kTwoPi;

  auto test = [&](std::int64_t n) {
    const Vec2 p = spiral_point_reduced(n, sqrtT, th);
    if (region.contains(p)) visit(n, p);
  };

  const std::int64_t K = isqrt(n_max);
  for (std::int64_t k = 0; k <= K; ++k) {
    const std::int64_t lo = std::max<std::int64_t>(1, k * k);
    const std::int64_t hi = std::min(n_max, (k + 1) * (k + 1) - 1);
    if (lo > hi) continue;
    const double eps = Y * std::sqrt(std::numbers::pi / (T * static_cast<double>(lo)));
    if (eps >= 0.5) {
      for (std::int64_t n = lo; n <= hi; ++n) test(n);
      continue;
    }
    const double delta = eps / 4.0 * (1.0 + 1e-9) + 1e-12;
    const double kd = static_cast<double>(k);
    const auto jlo = static_cast<std::int64_t>(std::ceil(2.0 * (kd - delta - c0)));
    const auto jhi = static_cast<std::int64_t>(std::floor(2.0 * (kd + 1.0 + delta - c0)));
    std::int64_t next = lo;
    for (std::int64_t j = jlo; j <= jhi; ++j) {
      const double c = c0 + 0.5 * static_cast<double>(j);
      const double a = std::max(0.0, c - delta);
      const double b = c + delta;
      std::int64_t wlo = static_cast<std::int64_t>(std::floor(a * a)) - 1;
      std::int64_t whi = static_cast<std::int64_t>(std::ceil(b * b)) + 1;
      wlo = std::max(wlo, next);
      whi = std::min(whi, hi);
      for (std::int64_t n = wlo; n <= whi; ++n) test(n);
      next = std::max(next, whi + 1);
    }
  }
}

}  // namespace

Vec2 spiral_point(std::int64_t n, double T, double theta) {
  if (n < 1) throw std::invalid_argument("spiral_point: n must be >= 1");
  return spiral_point_reduced(n, std::sqrt(T), reduce_angle(theta));
}

std::vector<SpiralPoint> spiral_points(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("spiral_points: radius must be positive");
  }
  const auto n_max = static_cast<std::int64_t>(std::floor(std::numbers::pi * radius * radius));
  std::vector<SpiralPoint> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n_max, 0)));
  for (std::int64_t n = 1; n <= n_max; ++n) out.push_back({n, spiral_point_reduced(n, 1.0, 0.0)});
  return out;
}

std::vector<SpiralPoint> theta_T_points(double T, double theta, const Region& region) {
  std::vector<SpiralPoint> out;
  scan_theta_T(T, theta, region, [&](std::int64_t n, Vec2 p) { out.push_back({n, p}); });
  return out;
}

std::size_t theta_T_count(double T, double theta, const Region& region) {
  std::size_t count = 0;
  scan_theta_T(T, theta, region, [&](std::int64_t, Vec2) { ++count; });
  return count;
}

// ---------------------------------------------------------------------------

namespace {

void check_xi(double xi) {
  if (!std::isfinite(xi)) throw std::invalid_argument("match: xi must be finite");
  const double dist = std::abs(xi - std::nearbyint(xi));
  if (dist <= kXiExclusion) {
    throw std::invalid_argument("match: xi lies within 1e-3 of an integer");
  }
}

// Right half plane: shift = xi, partner (-m, n - m^2) of Z^2 N(xi) D(pi T).
// Left half plane: shift = zeta = xi - 1/2, partner (-m, n - m^2) of
// -[Z^2 N(zeta) D(pi T)]. In both cases m is the integer with
// -1/2 <= sqrt n + shift + m < 1/2.
MatchReport match_impl(double T, double xi, const Region& region, bool left) {
  check_xi(xi);
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("match: T must be positive");
  const double shift = left ? xi - 0.5 : xi;
  const double theta = -kTwoPi * xi;
  const AffineMap g = compose(shear(shift), dilation(std::numbers::pi * T));
  const double scale = std::sqrt(std::numbers::pi * T);

  const auto spiral = theta_T_points(T, theta, region);
  const auto lattice = enumerate_affine_lattice(g, {0.0, 0.0}, region, left);
  std::map<std::pair<std::int64_t, std::int64_t>, bool> hit;
  for (const auto& lp : lattice) hit.emplace(std::pair{lp.m, lp.n}, false);

  auto partner_m = [&](std::int64_t n) {
    const double r = static_cast<double>(isqrt(n));
    return static_cast<std::int64_t>(-r + std::ceil(-0.5 - sqrt_frac(n) - shift));
  };

  struct Pair {
    Vec2 spiral;
    Vec2 lattice;
  };
  auto lattice_frame = [&](Vec2 d) { return std::hypot(d.x * scale, d.y / scale); };

  MatchReport rep;
  rep.region = region;
  rep.T = T;
  rep.xi = xi;

  std::vector<Vec2> unmatched_spiral;
  std::vector<Vec2> unmatched_lattice;
  auto record = [&](const Pair& pr) {
    const Vec2 d = pr.spiral - pr.lattice;
    rep.max_displacement = std::max(rep.max_displacement, lattice_frame(d));
    rep.max_plane_displacement = std::max(rep.max_plane_displacement, d.norm());
  };

  for (const auto& sp : spiral) {
    const std::int64_t m = partner_m(sp.n);
    const std::int64_t a = -m;
    const std::int64_t b = sp.n - m * m;
    const Pair pr{sp.p, lattice_point(g, {0.0, 0.0}, a, b, left)};
    record(pr);
    auto it = hit.find({a, b});
    if (it != hit.end()) {
      it->second = true;
      ++rep.n_matched;
    } else {
      unmatched_spiral.push_back(sp.p);
    }
  }
  for (const auto& lp : lattice) {
    if (hit.at({lp.m, lp.n})) continue;
    unmatched_lattice.push_back(lp.p);
    const std::int64_t m = -lp.m;
    const std::int64_t n = lp.n + m * m;
    if (n >= 1 && partner_m(n) == m) {
      record({spiral_point(n, T, theta), lp.p});
    }
  }

  const double band = 2.0 * rep.max_plane_displacement;
  for (Vec2 p : unmatched_spiral) {
    if (region.boundary_distance(p) < band) {
      ++rep.n_boundary_excluded;
    } else {
      ++rep.n_unmatched_spiral;
    }
  }
  for (Vec2 p : unmatched_lattice) {
    if (region.boundary_distance(p) < band) {
      ++rep.n_boundary_excluded;
    } else {
      ++rep.n_unmatched_lattice;
    }
  }
  return rep;
}

}  // namespace

MatchReport match_right(double T, double xi, const Region& region, double margin) {
  if (region.bounding_box().xmin < margin) {
    throw std::invalid_argument("match_right: region must lie in x >= margin");
  }
  return match_impl(T, xi, region, false);
}

MatchReport match_left(double T, double xi, const Region& region, double margin) {
  if (region.bounding_box().xmax > -margin) {
    throw std::invalid_argument("match_left: region must lie in x <= -margin");
  }
  return match_impl(T, xi, region, true);
}

}  // namespace latstat
