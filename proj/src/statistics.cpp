#include "latstat/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace latstat {

CountingPMF counting_pmf(std::span<const std::int64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("counting_pmf: empty input");
  std::map<std::int64_t, std::int64_t> freq;
  for (auto c : counts) {
    if (c < 0) throw std::invalid_argument("counting_pmf: negative count");
    ++freq[c];
  }
  CountingPMF p;
  p.n_samples = counts.size();
  const double n = static_cast<double>(counts.size());
  for (const auto& [k, f] : freq) p.probs[k] = static_cast<double>(f) / n;
  return p;
}

JointPMF joint_pmf(std::span<const std::int64_t> first, std::span<const std::int64_t> second) {
  if (first.empty() || first.size() != second.size()) {
    throw std::invalid_argument("joint_pmf: need two nonempty lists of equal length");
  }
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> freq;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i] < 0 || second[i] < 0) throw std::invalid_argument("joint_pmf: negative count");
    ++freq[{first[i], second[i]}];
  }
  JointPMF p;
  p.n_samples = first.size();
  const double n = static_cast<double>(first.size());
  for (const auto& [k, f] : freq) p.probs[k] = static_cast<double>(f) / n;
  return p;
}

double mean(const CountingPMF& p) {
  double m = 0.0;
  for (const auto& [k, v] : p.probs) m += static_cast<double>(k) * v;
  return m;
}

double ecdf_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ecdf_ks: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

std::int64_t pair_count(std::span<const Vec2> points, const Region& A, const Region& B) {
  std::int64_t in_a = 0, in_b = 0, in_both = 0;
  for (Vec2 p : points) {
    const bool a = A.contains(p);
    const bool b = B.contains(p);
    in_a += a;
    in_b += b;
    in_both += a && b;
  }
  // Every (y1 in A, y2 in B) combination minus the diagonal y1 == y2.
  return in_a * in_b - in_both;
}

Histogram make_histogram(std::span<const double> values, int bins, double lo, double hi) {
  if (bins < 1) throw std::invalid_argument("make_histogram: bins must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("make_histogram: require lo < hi");
  Histogram h;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    if (v < lo) {
      ++h.underflow;
    } else if (!(v < hi)) {
      ++h.overflow;
    } else {
      auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * bins);
      k = std::min(k, static_cast<std::size_t>(bins) - 1);
      // Rounding in the division can put v one bin off its edges.
      while (k > 0 && v < h.bin_edges[k]) --k;
      while (k + 1 < static_cast<std::size_t>(bins) && v >= h.bin_edges[k + 1]) ++k;
      ++h.counts[k];
      ++h.total;
    }
  }
  return h;
}

MeanEstimate estimate_mean(std::span<const double> values) {
  MeanEstimate e;
  e.n = values.size();
  if (values.empty()) return e;
  double s = 0.0;
  for (double v : values) s += v;
  e.mean = s / static_cast<double>(e.n);
  if (e.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  }
  return e;
}

MeanEstimate estimate_variance(std::span<const double> values) {
  MeanEstimate e;
  e.n = values.size();
  if (e.n < 2) return e;
  const double n = static_cast<double>(e.n);
  double m = 0.0;
  for (double v : values) m += v;
  m /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d2 = (v - m) * (v - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  e.mean = m2 * n / (n - 1.0);
  e.se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return e;
}

MeanEstimate estimate_covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("estimate_covariance: length mismatch");
  MeanEstimate e;
  e.n = a.size();
  if (e.n < 2) return e;
  const double n = static_cast<double>(e.n);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n;
  mb /= n;
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = (a[i] - ma) * (b[i] - mb);
  const MeanEstimate p = estimate_mean(prod);
  e.mean = p.mean * n / (n - 1.0);
  e.se = p.se;
  return e;
}

namespace {

double chi2_upper_tail(double stat, int dof) {
  if (dof < 1) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: shape mismatch");
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) na += static_cast<double>(a[i]), nb += static_cast<double>(b[i]);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("chi_square_two_sample: empty table");
  ChiSquareResult r;
  int cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0.0) continue;
    ++cells;
    const double ea = col * na / (na + nb);
    const double eb = col * nb / (na + nb);
    r.statistic += (static_cast<double>(a[i]) - ea) * (static_cast<double>(a[i]) - ea) / ea;
    r.statistic += (static_cast<double>(b[i]) - eb) * (static_cast<double>(b[i]) - eb) / eb;
  }
  r.dof = cells - 1;
  r.p_value = chi2_upper_tail(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected_probs) {
  if (observed.size() != expected_probs.size()) throw std::invalid_argument("chi_square_gof: shape mismatch");
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);
  ChiSquareResult r;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * expected_probs[i];
    if (e <= 0.0) continue;
    ++cells;
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
  }
  r.dof = cells - 1;
  r.p_value = chi2_upper_tail(r.statistic, r.dof);
  return r;
}

}  // namespace latstat
