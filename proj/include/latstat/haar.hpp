#pragma once

// Random affine lattices on Y = Lambda \ ASL(2,R), Lambda = Gamma_{2,0}(4) x Z^2,
// and the limit process Theta glued from two of them along the vertical axis.

#include <array>
#include <cstdint>
#include <vector>

#include "latstat/geometry.hpp"
#include "latstat/rng.hpp"

namespace latstat {

struct IntMat2 {
  std::int64_t a = 1, b = 0;
  std::int64_t c = 0, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  IntMat2 operator*(const IntMat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  bool operator==(const IntMat2&) const = default;
  Mat2 to_real() const {
    return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c), static_cast<double>(d)};
  }
};

// Inverse of a determinant-one integer matrix.
IntMat2 inverse(const IntMat2& m);

// True iff m = I or ((1, 2), (0, 1)) mod 4. Throws std::invalid_argument when
// det(m) != 1.
bool is_in_gamma(const IntMat2& m);

// Brute-force enumeration of SL(2, Z/modulus), entries in [0, modulus).
std::vector<IntMat2> enumerate_sl2_mod(int modulus);

// Representatives gamma_i with SL(2,Z) = disjoint union of Gamma_{2,0}(4) gamma_i.
struct CosetTable {
  std::vector<IntMat2> reps;
};

CosetTable build_coset_table();
// Shared read-only table, built on first use.
const CosetTable& coset_table();
inline constexpr std::size_t kCosetCount = 24;

// Point of the standard fundamental domain |x| <= 1/2, x^2 + y^2 >= 1 with an
// angle; parametrizes SL(2,Z) \ SL(2,R).
struct ModularFrame {
  double x = 0.0;
  double y = 1.0;
  double phi = 0.0;
};

// Frame from three uniforms: u, w in [0, 1), v in (0, 1].
ModularFrame frame_from_uniforms(double u, double v, double w);
ModularFrame sample_frame(Stream& rng);

// Rows (1/sqrt y, 0) and (x/sqrt y, sqrt y), times k(phi).
Mat2 frame_to_matrix(const ModularFrame& f);

inline constexpr double kCuspWarning = 1e4;
// Number of frames sampled so far with y above kCuspWarning.
std::uint64_t cusp_sample_count();

struct AffineSample {
  ModularFrame frame;
  std::uint32_t coset = 0;
  Vec2 trans;  // lattice coordinates in [0, 1)^2
  AffineMap g;
};

// g = (gamma_coset M, trans gamma_coset M), so Z^2 g = (Z^2 + trans) gamma M.
AffineSample make_sample(const ModularFrame& frame, std::uint32_t coset, Vec2 trans);
AffineSample sample_Y(Stream& rng);

inline constexpr Vec2 kHalfShift{0.5, -0.25};

struct ThetaRealization {
  AffineSample sample;
  std::vector<Vec2> points;
  Region region;
};

// (Z^2 g on x >= 0) union (-[(Z^2 + (1/2, -1/4)) g] on x < 0), inside region.
std::vector<Vec2> theta_points(const AffineMap& g, const Region& region);
std::size_t theta_count(const AffineMap& g, const Region& region);
ThetaRealization realize_theta(const AffineSample& s, const Region& region);

// Xi = Z^2 g (shifted = false) or Xi~ = -[(Z^2 + (1/2, -1/4)) g] (shifted = true),
// over the whole region.
std::vector<Vec2> realize_xi(const AffineSample& s, const Region& region, bool shifted);

// Whether p lies in s (Z^2 + offset) g up to tol in lattice coordinates.
bool on_affine_lattice(Vec2 p, const AffineMap& g, Vec2 offset, bool negate, double tol = 1e-6);

// Checks the realization invariant: right-half points on Z^2 g, left-half
// points on -[(Z^2 + (1/2, -1/4)) g].
bool verify_realization(const ThetaRealization& r);

}  // namespace latstat
