#pragma once

// Fractional-part sequences on the circle R/Z, their gap statistics, and the
// directions of vectors in a shifted integer lattice.

#include <cstdint>
#include <vector>

#include "latstat/geometry.hpp"

namespace latstat {

struct GapSample {
  std::vector<double> values;       // sorted, in [0, 1)
  std::vector<double> gaps;         // gaps[i] = values[i+1] - values[i]; last wraps to 1 + values[0]
  std::vector<double> scaled_gaps;  // gaps * N
  std::size_t n_points = 0;
};

// sqrt(n) mod 1 for n = 1..n_max; perfect squares give exactly 0.
std::vector<double> frac_sqrt(std::int64_t n_max);

// n^beta mod 1 for n = 1..n_max, 0 < beta < 1.
std::vector<double> frac_power(std::int64_t n_max, double beta);

// Sorts values and forms circular gaps. Duplicates are kept and give zero
// gaps. Throws std::invalid_argument for an empty list or a value outside [0, 1).
GapSample circular_gaps(std::vector<double> values);

// Directions of the vectors (m, n) - q with |(m, n) - q| < radius, as
// angle / 2pi in [0, 1). With half_plane_only the vectors are restricted to
// n >= 0 and normalized by angle / pi (so the direction pi wraps to 0).
// Output is ordered by (length, angle). Throws for q in Z^2 or radius <= 0.
std::vector<double> direction_fracs(Vec2 q, double radius, bool half_plane_only = false);

// Exact fractional part of sqrt(n), computed as (n - r^2) / (sqrt(n) + r)
// with r = isqrt(n) so no integer part is subtracted in floating point.
double sqrt_frac(std::int64_t n);
std::int64_t isqrt(std::int64_t n);

}  // namespace latstat
