#pragma once

// Seeded Monte Carlo experiments. Each experiment is a deterministic function
// of its configuration: replica r of sub-experiment k draws from its own
// Stream, and reductions run in replica order.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latstat/geometry.hpp"
#include "latstat/haar.hpp"
#include "latstat/rng.hpp"
#include "latstat/statistics.hpp"

namespace latstat {

// Absolutely continuous law on the circle R/Z, written as a fraction t in
// [0, 1). Angle experiments use theta = 2 pi t, lattice experiments xi = t.
struct LambdaLaw {
  enum class Kind { kUniformCircle, kUniformInterval, kDensityTable };
  Kind kind = Kind::kUniformCircle;
  double lo = 0.0;
  double hi = 1.0;
  // Probabilities of equal-width bins of [0, 1); must sum to 1 within 1e-9.
  std::vector<double> table;

  static LambdaLaw uniform() { return {}; }
  static LambdaLaw interval(double lo, double hi);
  static LambdaLaw density_table(std::vector<double> probs);
  // Density 2t on [0, 1) discretized into `bins` equal-mass-weighted bins.
  static LambdaLaw triangular(int bins = 100);

  void validate() const;
  double sample(Stream& rng) const;
  std::string describe() const;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::int64_t replicas = 1000;
  std::vector<double> T_list;
  std::vector<Region> regions;
  LambdaLaw lambda;
  std::optional<LambdaLaw> lambda_alt;
  std::string out_json;
  std::string out_csv;
  std::string out_svg;

  // Throws std::invalid_argument on replicas < 1, a T_list that is not
  // strictly increasing and positive, or an invalid lambda.
  void validate() const;
};

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  nlohmann::ordered_json inputs;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::array();
  std::vector<Check> checks;
  std::vector<std::string> flags;
  double wall_seconds = 0.0;

  bool passed() const;
  // Deterministic JSON; wall time is included only when asked for.
  nlohmann::ordered_json to_json(bool include_timing = false) const;
};

nlohmann::ordered_json region_to_json(const Region& r);
std::string region_to_string(const Region& r);

// Streams for sub-experiment `tag` (a short name) and sub-index k.
Stream experiment_stream(std::uint64_t seed, const std::string& tag, std::uint64_t k, std::uint64_t replica);

// ---------------------------------------------------------------------------
// Figure 1: gaps of sqrt(n) mod 1 against directions of Z^2 - q.

struct Figure1Result {
  ExperimentReport report;
  std::vector<double> sqrt_scaled_gaps;
  std::vector<double> direction_scaled_gaps;
  Histogram sqrt_hist;
  Histogram direction_hist;
  double ks = 0.0;
};

inline constexpr double kFigure1KsThreshold = 0.05;

// Whether q lies in Q Z^2, tested for denominators up to max_den.
bool is_rational_point(Vec2 q, std::int64_t max_den = 1000, double tol = 1e-12);

Figure1Result run_figure1(std::int64_t n_max, Vec2 q, double radius, int bins = 50, double lo = 0.0,
                          double hi = 3.0);

// ---------------------------------------------------------------------------
// Counting samplers shared by the experiments.

// #(Theta_T intersect region) for replicas draws of theta = 2 pi t, t ~ lambda.
std::vector<std::int64_t> theta_T_counts(double T, const Region& region, const LambdaLaw& lambda,
                                         std::uint64_t seed, std::uint64_t k, std::int64_t replicas);
// #(Theta intersect region) for replicas samples of mu.
std::vector<std::int64_t> theta_counts(const Region& region, std::uint64_t seed, const std::string& tag,
                                       std::int64_t replicas);

// ---------------------------------------------------------------------------

struct ConvergenceResult {
  ExperimentReport report;
  std::vector<double> tv;
  std::vector<double> noise;
  CountingPMF reference;
  std::vector<CountingPMF> per_T;
};

inline constexpr double kConvergenceTvThreshold = 0.05;

ConvergenceResult run_convergence(const ExperimentConfig& cfg, const Region& region);

struct EquidistributionResult {
  ExperimentReport report;
  std::vector<double> tv;       // per T, LHS vs mu side
  std::vector<double> noise;
  std::vector<double> tv_alt;   // per T, LHS under lambda vs lambda_alt
  std::vector<double> noise_alt;
};

inline constexpr double kEquidistributionTvThreshold = 0.05;

// Joint counts of Z^2 N(xi) D(T) in A and (Z^2 + (1/2, -1/4)) N(xi) D(T) in B,
// against Z^2 g and (Z^2 + (1/2, -1/4)) g for g ~ mu.
EquidistributionResult run_equidistribution(const ExperimentConfig& cfg, const Region& A, const Region& B);

struct BatteryStat {
  std::string name;
  double theta_value = 0.0;
  double transformed_value = 0.0;
  // Standard error of theta_value - transformed_value.
  double combined_se = 0.0;
  double z() const;
};

struct InvarianceResult {
  ExperimentReport report;
  double tv = 0.0;
  double tv_noise = 0.0;
  bool in_P = false;
  std::vector<BatteryStat> battery;
};

inline constexpr double kInvarianceTvThreshold = 0.02;
inline constexpr double kSeparationSigmas = 3.0;

// Whether h = ((a, b), (0, 1/a)), (0, y)) lies in the subgroup P.
bool in_subgroup_P(const AffineMap& h, double tol = 1e-12);

// Counts of (Theta h) intersect region from a realization of Theta.
std::int64_t transformed_count(const AffineMap& g, const AffineMap& h, const Region& region);

InvarianceResult run_invariance(const ExperimentConfig& cfg, const AffineMap& element, const Region& region);

struct LinearizationResult {
  ExperimentReport report;
  std::vector<double> mean_right;
  std::vector<double> mean_left;
  double slope = 0.0;
  std::int64_t unmatched = 0;
};

inline constexpr double kSlopeLo = -1.3;
inline constexpr double kSlopeHi = -0.7;

// Uses cfg.regions[0] (right half plane) and cfg.regions[1] (left half plane)
// when given, else [0.2, 1.2] x [-1, 1] and its mirror.
LinearizationResult run_linearization(const ExperimentConfig& cfg);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace latstat
