#include "latstat/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace latstat {

std::int64_t isqrt(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("isqrt: negative argument");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > n / std::max<std::int64_t>(r, 1)) --r;
  while (r + 1 <= n / (r + 1)) ++r;
  return r;
}

double sqrt_frac(std::int64_t n) {
  const std::int64_t r = isqrt(n);
  const std::int64_t rem = n - r * r;
  if (rem == 0) return 0.0;
  const double f = static_cast<double>(rem) / (std::sqrt(static_cast<double>(n)) + static_cast<double>(r));
  return std::min(f, std::nextafter(1.0, 0.0));
}

std::vector<double> frac_sqrt(std::int64_t n_max) {
  if (n_max < 1) throw std::invalid_argument("frac_sqrt: n_max must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n_max));
  for (std::int64_t n = 1; n <= n_max; ++n) out[static_cast<std::size_t>(n - 1)] = sqrt_frac(n);
  return out;
}

std::vector<double> frac_power(std::int64_t n_max, double beta) {
  if (n_max < 1) throw std::invalid_argument("frac_power: n_max must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("frac_power: beta must lie in (0, 1)");
  if (beta == 0.5) return frac_sqrt(n_max);
  std::vector<double> out(static_cast<std::size_t>(n_max));
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double v = std::pow(static_cast<double>(n), beta);
    const double k = std::nearbyint(v);
    // Exact integer powers (8^{1/3}) come back one ulp short of the integer.
    double f = std::abs(v - k) <= 4.0 * std::numeric_limits<double>::epsilon() * v ? 0.0 : v - std::floor(v);
    out[static_cast<std::size_t>(n - 1)] = std::min(f, std::nextafter(1.0, 0.0));
  }
  return out;
}

GapSample circular_gaps(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("circular_gaps: empty input");
  for (double v : values) {
    if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("circular_gaps: value outside [0, 1)");
  }
  std::sort(values.begin(), values.end());
  const std::size_t N = values.size();
  GapSample s;
  s.n_points = N;
  s.gaps.resize(N);
  s.scaled_gaps.resize(N);
  for (std::size_t i = 0; i + 1 < N; ++i) s.gaps[i] = values[i + 1] - values[i];
  s.gaps[N - 1] = 1.0 + values.front() - values.back();
  for (std::size_t i = 0; i < N; ++i) s.scaled_gaps[i] = s.gaps[i] * static_cast<double>(N);
  s.values = std::move(values);
  return s;
}

std::vector<double> direction_fracs(Vec2 q, double radius, bool half_plane_only) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("direction_fracs: radius must be positive");
  }
  if (q.x == std::floor(q.x) && q.y == std::floor(q.y)) {
    throw std::invalid_argument("direction_fracs: observer on a lattice point");
  }
  struct Dir {
    double len2;
    double frac;
  };
  std::vector<Dir> dirs;
  const double r2 = radius * radius;
  const auto nlo = half_plane_only ? std::int64_t{0} : static_cast<std::int64_t>(std::floor(q.y - radius));
  const auto nhi = static_cast<std::int64_t>(std::ceil(q.y + radius));
  const double norm = half_plane_only ? std::numbers::pi : 2.0 * std::numbers::pi;
  for (std::int64_t n = nlo; n <= nhi; ++n) {
    const double dy = static_cast<double>(n) - q.y;
    if (dy * dy >= r2) continue;
    const double w = std::sqrt(r2 - dy * dy);
    const auto mlo = static_cast<std::int64_t>(std::floor(q.x - w)) - 1;
    const auto mhi = static_cast<std::int64_t>(std::ceil(q.x + w)) + 1;
    for (std::int64_t m = mlo; m <= mhi; ++m) {
      const double dx = static_cast<double>(m) - q.x;
      const double len2 = dx * dx + dy * dy;
      if (len2 >= r2) continue;
      double angle = std::atan2(dy, dx);
      if (angle < 0.0) angle += 2.0 * std::numbers::pi;
      double f = angle / norm;
      f -= std::floor(f);
      if (f >= 1.0) f = 0.0;
      dirs.push_back({len2, f});
    }
  }
  std::sort(dirs.begin(), dirs.end(), [](const Dir& a, const Dir& b) {
    return std::tie(a.len2, a.frac) < std::tie(b.len2, b.frac);
  });
  std::vector<double> out;
  out.reserve(dirs.size());
  for (const Dir& d : dirs) out.push_back(d.frac);
  return out;
}

}  // namespace latstat
