#include "latstat/haar.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace latstat {

namespace {

std::int64_t mod(std::int64_t v, std::int64_t m) {
  const std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

IntMat2 reduce(const IntMat2& m, std::int64_t q) {
  return {mod(m.a, q), mod(m.b, q), mod(m.c, q), mod(m.d, q)};
}

constexpr IntMat2 kIdentity{1, 0, 0, 1};
constexpr IntMat2 kUpperTwo{1, 2, 0, 1};

std::atomic<std::uint64_t> g_cusp_samples{0};
constexpr std::uint64_t kCuspLogLimit = 3;

}  // namespace

IntMat2 inverse(const IntMat2& m) {
  if (m.det() != 1) throw std::invalid_argument("inverse: integer matrix is not unimodular");
  return {m.d, -m.b, -m.c, m.a};
}

bool is_in_gamma(const IntMat2& m) {
  if (m.det() != 1) throw std::invalid_argument("is_in_gamma: determinant must be 1");
  const IntMat2 r = reduce(m, 4);
  return r == kIdentity || r == kUpperTwo;
}

std::vector<IntMat2> enumerate_sl2_mod(int modulus) {
  if (modulus < 2) throw std::invalid_argument("enumerate_sl2_mod: modulus must be >= 2");
  std::vector<IntMat2> out;
  for (std::int64_t a = 0; a < modulus; ++a)
    for (std::int64_t b = 0; b < modulus; ++b)
      for (std::int64_t c = 0; c < modulus; ++c)
        for (std::int64_t d = 0; d < modulus; ++d)
          if (mod(a * d - b * c, modulus) == 1) out.push_back({a, b, c, d});
  return out;
}

namespace {

// Smallest integer lift (by max |entry|, then lexicographic over values
// ordered 0, 1, -1, 2, -2, ...) of a residue class mod 4 with det exactly 1.
IntMat2 lift(const IntMat2& residue) {
  std::vector<std::int64_t> order{0};
  for (std::int64_t k = 1; k <= 8; ++k) order.insert(order.end(), {k, -k});
  for (std::int64_t bound = 0; bound <= 8; ++bound) {
    for (auto a : order) {
      if (std::abs(a) > bound || mod(a, 4) != residue.a) continue;
      for (auto b : order) {
        if (std::abs(b) > bound || mod(b, 4) != residue.b) continue;
        for (auto c : order) {
          if (std::abs(c) > bound || mod(c, 4) != residue.c) continue;
          for (auto d : order) {
            if (std::abs(d) > bound || mod(d, 4) != residue.d) continue;
            if (a * d - b * c == 1) return {a, b, c, d};
          }
        }
      }
    }
  }
  throw std::logic_error("coset lift failed");
}

bool lex_less(const IntMat2& p, const IntMat2& q) {
  return std::tie(p.a, p.b, p.c, p.d) < std::tie(q.a, q.b, q.c, q.d);
}

}  // namespace

CosetTable build_coset_table() {
  const auto group = enumerate_sl2_mod(4);
  // Right cosets H gamma of H = {I, S} in SL(2, Z/4): gamma ~ S gamma.
  std::vector<IntMat2> reps;
  std::vector<bool> used(group.size(), false);
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (used[i]) continue;
    const IntMat2 partner = reduce(kUpperTwo * group[i], 4);
    for (std::size_t j = i; j < group.size(); ++j) {
      if (group[j] == partner || j == i) used[j] = true;
    }
    reps.push_back(lex_less(group[i], partner) ? group[i] : partner);
  }
  std::sort(reps.begin(), reps.end(), lex_less);
  CosetTable table;
  for (const auto& r : reps) {
    const IntMat2 g = lift(r);
    assert(g.det() == 1 && reduce(g, 4) == r);
    table.reps.push_back(g);
  }
  return table;
}

const CosetTable& coset_table() {
  static const CosetTable table = build_coset_table();
  return table;
}

// ---------------------------------------------------------------------------

ModularFrame frame_from_uniforms(double u, double v, double w) {
  ModularFrame f;
  // Marginal of x is proportional to 1/sqrt(1 - x^2) on [-1/2, 1/2].
  f.x = std::sin(std::numbers::pi * (2.0 * u - 1.0) / 6.0);
  // Given x, y has density proportional to 1/y^2 above sqrt(1 - x^2).
  f.y = std::sqrt(1.0 - f.x * f.x) / v;
  f.phi = 2.0 * std::numbers::pi * w;
  return f;
}

ModularFrame sample_frame(Stream& rng) {
  const double u = rng.uniform();
  const double v = rng.uniform_open_closed();
  const double w = rng.uniform();
  const ModularFrame f = frame_from_uniforms(u, v, w);
  if (f.y > kCuspWarning) {
    const auto seen = g_cusp_samples.fetch_add(1, std::memory_order_relaxed);
    if (seen < kCuspLogLimit) {
      std::clog << "latstat: deep cusp sample y=" << f.y << (seen + 1 == kCuspLogLimit ? " (further ones not logged)" : "")
                << "\n";
    }
  }
  return f;
}

std::uint64_t cusp_sample_count() { return g_cusp_samples.load(std::memory_order_relaxed); }

Mat2 frame_to_matrix(const ModularFrame& f) {
  const double r = std::sqrt(f.y);
  const Mat2 base{1.0 / r, 0.0, f.x / r, r};
  return base * rotation(f.phi).m();
}

AffineSample make_sample(const ModularFrame& frame, std::uint32_t coset, Vec2 trans) {
  const auto& reps = coset_table().reps;
  if (coset >= reps.size()) throw std::invalid_argument("make_sample: coset index out of range");
  AffineSample s;
  s.frame = frame;
  s.coset = coset;
  s.trans = trans;
  const Mat2 m = reps[coset].to_real() * frame_to_matrix(frame);
  s.g = AffineMap(m, trans * m);
  return s;
}

AffineSample sample_Y(Stream& rng) {
  const ModularFrame f = sample_frame(rng);
  const auto coset = static_cast<std::uint32_t>(rng.below(kCosetCount));
  const double tx = rng.uniform();
  const double ty = rng.uniform();
  return make_sample(f, coset, {tx, ty});
}

// ---------------------------------------------------------------------------

std::vector<Vec2> theta_points(const AffineMap& g, const Region& region) {
  std::vector<Vec2> out;
  for (const auto& lp : enumerate_affine_lattice(g, {0.0, 0.0}, Region::clip(HalfPlane::kRight, region)))
    out.push_back(lp.p);
  for (const auto& lp : enumerate_affine_lattice(g, kHalfShift, Region::clip(HalfPlane::kLeft, region), true))
    out.push_back(lp.p);
  return out;
}

std::size_t theta_count(const AffineMap& g, const Region& region) {
  return count_affine_lattice(g, {0.0, 0.0}, Region::clip(HalfPlane::kRight, region)) +
         count_affine_lattice(g, kHalfShift, Region::clip(HalfPlane::kLeft, region), true);
}

ThetaRealization realize_theta(const AffineSample& s, const Region& region) {
  return {s, theta_points(s.g, region), region};
}

std::vector<Vec2> realize_xi(const AffineSample& s, const Region& region, bool shifted) {
  std::vector<Vec2> out;
  const Vec2 offset = shifted ? kHalfShift : Vec2{0.0, 0.0};
  for (const auto& lp : enumerate_affine_lattice(s.g, offset, region, shifted)) out.push_back(lp.p);
  return out;
}

bool on_affine_lattice(Vec2 p, const AffineMap& g, Vec2 offset, bool negate, double tol) {
  const Vec2 q = negate ? -p : p;
  const Vec2 w = act(q, inverse(g)) - offset;
  return std::abs(w.x - std::nearbyint(w.x)) <= tol && std::abs(w.y - std::nearbyint(w.y)) <= tol;
}

bool verify_realization(const ThetaRealization& r) {
  for (Vec2 p : r.points) {
    if (!r.region.contains(p)) return false;
    const bool ok = p.x >= 0.0 ? on_affine_lattice(p, r.sample.g, {0.0, 0.0}, false)
                               : on_affine_lattice(p, r.sample.g, kHalfShift, true);
    if (!ok) return false;
  }
  return true;
}

}  // namespace latstat
