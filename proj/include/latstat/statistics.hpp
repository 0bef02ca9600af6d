#pragma once

// Empirical distributions and distances: ECDF/KS for continuous samples,
// counting PMFs and total variation for integer-valued counts, pair counts
// for two-point statistics.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "latstat/geometry.hpp"

namespace latstat {

// Normalized frequency table over a discrete key.
template <class Key>
struct BasicPMF {
  std::map<Key, double> probs;
  std::size_t n_samples = 0;

  double operator()(const Key& k) const {
    auto it = probs.find(k);
    return it == probs.end() ? 0.0 : it->second;
  }
};

using CountingPMF = BasicPMF<std::int64_t>;
using JointPMF = BasicPMF<std::pair<std::int64_t, std::int64_t>>;

// Throws std::invalid_argument for empty input or negative counts.
CountingPMF counting_pmf(std::span<const std::int64_t> counts);
JointPMF joint_pmf(std::span<const std::int64_t> first, std::span<const std::int64_t> second);

double mean(const CountingPMF& p);

template <class Key>
double tv_distance(const BasicPMF<Key>& p, const BasicPMF<Key>& q) {
  double sum = 0.0;
  for (const auto& [k, v] : p.probs) sum += std::abs(v - q(k));
  for (const auto& [k, v] : q.probs) {
    if (!p.probs.contains(k)) sum += v;
  }
  return 0.5 * sum;
}

// Expected TV between two independent empirical PMFs of the same law, from
// the normal approximation E|p_hat - q_hat| = sqrt(2/pi) sd, using the pooled
// frequencies as plug-in. Used as the Monte Carlo noise scale for TV.
template <class Key>
double tv_noise(const BasicPMF<Key>& p, const BasicPMF<Key>& q) {
  std::map<Key, double> pooled;
  const double np = static_cast<double>(p.n_samples);
  const double nq = static_cast<double>(q.n_samples);
  for (const auto& [k, v] : p.probs) pooled[k] += v * np / (np + nq);
  for (const auto& [k, v] : q.probs) pooled[k] += v * nq / (np + nq);
  double sum = 0.0;
  for (const auto& [k, r] : pooled) sum += std::sqrt(r * (1.0 - r) * (1.0 / np + 1.0 / nq));
  return 0.5 * std::sqrt(2.0 / 3.141592653589793) * sum;
}

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ecdf_ks(std::span<const double> a, std::span<const double> b);

// Ordered pairs (y1, y2), y1 != y2 (as list entries), y1 in A, y2 in B.
std::int64_t pair_count(std::span<const Vec2> points, const Region& A, const Region& B);

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  std::int64_t underflow = 0;
  std::int64_t overflow = 0;
  std::int64_t total = 0;  // values inside [lo, hi)
};

// Equal-width bins on [lo, hi); values outside land in underflow/overflow.
Histogram make_histogram(std::span<const double> values, int bins, double lo, double hi);

// Sample mean with its standard error (plug-in variance, n - 1 denominator).
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanEstimate estimate_mean(std::span<const double> values);

template <class T>
MeanEstimate estimate_mean_of(const std::vector<T>& values) {
  std::vector<double> d(values.begin(), values.end());
  return estimate_mean(d);
}

// Sample variance with a large-sample standard error sqrt((m4 - s^4) / n).
MeanEstimate estimate_variance(std::span<const double> values);

// Sample covariance with the standard error of the mean of centred products.
MeanEstimate estimate_covariance(std::span<const double> a, std::span<const double> b);

// Pearson chi-square homogeneity test between two count tables of equal
// shape; cells empty in both are dropped. Returns the upper-tail p-value.
struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

// Goodness of fit of observed counts against expected probabilities.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected_probs);

}  // namespace latstat
