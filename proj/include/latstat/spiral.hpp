#pragma once

// The spiral point set P = {sqrt(n/pi) (cos 2pi sqrt n, sin 2pi sqrt n)},
// its rotated and stretched images P k(theta) D(T), and the point matching
// against the affine lattices that approximate it in either half plane.

#include <cstdint>
#include <optional>
#include <vector>

#include "latstat/geometry.hpp"

namespace latstat {

struct SpiralPoint {
  std::int64_t n;
  Vec2 p;
};

// Point n of P k(theta) D(T).
Vec2 spiral_point(std::int64_t n, double T = 1.0, double theta = 0.0);

// Points of P with |p| <= radius, i.e. n <= pi radius^2, in index order.
std::vector<SpiralPoint> spiral_points(double radius);

// Points of P k(theta) D(T) inside region, in index order.
std::vector<SpiralPoint> theta_T_points(double T, double theta, const Region& region);
std::size_t theta_T_count(double T, double theta, const Region& region);

inline constexpr double kHalfPlaneMargin = 0.05;
inline constexpr double kXiExclusion = 1e-3;

struct MatchReport {
  std::int64_t n_matched = 0;
  std::int64_t n_unmatched_spiral = 0;
  std::int64_t n_unmatched_lattice = 0;
  // Largest displacement between a spiral point and its lattice partner,
  // measured after undoing the stretch D(pi T) (the frame of the lattice
  // Z^2 N(xi)). This is the quantity that decays like 1/T.
  double max_displacement = 0.0;
  // The same displacement measured in the plane of the region. It sets the
  // boundary band inside which unmatched points are not counted.
  double max_plane_displacement = 0.0;
  std::int64_t n_boundary_excluded = 0;
  std::optional<Region> region;
  double T = 0.0;
  double xi = 0.0;
};

// Matches Theta_T (theta = -2 pi xi) against Xi_T = Z^2 N(xi) D(pi T) in a
// region of the right half plane (x >= margin). Throws std::invalid_argument
// when xi is within 1e-3 of an integer or the region reaches past the margin.
MatchReport match_right(double T, double xi, const Region& region, double margin = kHalfPlaneMargin);

// Left half plane analogue against -[Z^2 N(zeta) D(pi T)], zeta = xi - 1/2,
// which equals -[(Z^2 + (1/2, -1/4)) N(xi) D(pi T)].
MatchReport match_left(double T, double xi, const Region& region, double margin = kHalfPlaneMargin);

}  // namespace latstat
