#include "latstat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "latstat/parallel.hpp"
#include "latstat/sequences.hpp"
#include "latstat/spiral.hpp"

namespace latstat {

namespace {

constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

nlohmann::ordered_json pmf_to_json(const CountingPMF& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p.probs) j[std::to_string(k)] = v;
  return j;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["replicas"] = cfg.replicas;
  j["T_list"] = cfg.T_list;
  j["regions"] = nlohmann::ordered_json::array();
  for (const auto& r : cfg.regions) j["regions"].push_back(region_to_json(r));
  j["lambda"] = cfg.lambda.describe();
  if (cfg.lambda_alt) j["lambda_alt"] = cfg.lambda_alt->describe();
  return j;
}

Check make_check(std::string name, double value, double threshold, bool pass) {
  return {std::move(name), value, threshold, pass};
}

}  // namespace

// ---------------------------------------------------------------------------

LambdaLaw LambdaLaw::interval(double lo, double hi) {
  LambdaLaw l;
  l.kind = Kind::kUniformInterval;
  l.lo = lo;
  l.hi = hi;
  l.validate();
  return l;
}

LambdaLaw LambdaLaw::density_table(std::vector<double> probs) {
  LambdaLaw l;
  l.kind = Kind::kDensityTable;
  l.table = std::move(probs);
  l.validate();
  return l;
}

LambdaLaw LambdaLaw::triangular(int bins) {
  std::vector<double> probs(static_cast<std::size_t>(bins));
  const double b2 = static_cast<double>(bins) * bins;
  for (int i = 0; i < bins; ++i) probs[static_cast<std::size_t>(i)] = (2.0 * i + 1.0) / b2;
  return density_table(std::move(probs));
}

void LambdaLaw::validate() const {
  switch (kind) {
    case Kind::kUniformCircle:
      return;
    case Kind::kUniformInterval:
      if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
        throw std::invalid_argument("lambda: interval must satisfy 0 <= lo < hi <= 1");
      }
      return;
    case Kind::kDensityTable: {
      if (table.empty()) throw std::invalid_argument("lambda: empty density table");
      double sum = 0.0;
      for (double p : table) {
        if (!(p >= 0.0)) throw std::invalid_argument("lambda: negative table entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("lambda: table must sum to 1");
      return;
    }
  }
}

double LambdaLaw::sample(Stream& rng) const {
  const double u = rng.uniform();
  switch (kind) {
    case Kind::kUniformCircle:
      return u;
    case Kind::kUniformInterval:
      return lo + (hi - lo) * u;
    case Kind::kDensityTable: {
      double acc = 0.0;
      const double w = 1.0 / static_cast<double>(table.size());
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i] <= 0.0) continue;
        if (u < acc + table[i] || i + 1 == table.size()) {
          const double within = std::clamp((u - acc) / table[i], 0.0, 1.0);
          return std::min(w * (static_cast<double>(i) + within), std::nextafter(1.0, 0.0));
        }
        acc += table[i];
      }
      return std::nextafter(1.0, 0.0);
    }
  }
  return u;
}

std::string LambdaLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kUniformCircle:
      return "uniform_circle";
    case Kind::kUniformInterval:
      os << "uniform_interval(" << lo << "," << hi << ")";
      return os.str();
    case Kind::kDensityTable:
      os << "custom_density_table(" << table.size() << " bins)";
      return os.str();
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
  for (std::size_t i = 0; i < T_list.size(); ++i) {
    if (!(T_list[i] > 0.0) || !std::isfinite(T_list[i])) throw std::invalid_argument("config: T must be positive");
    if (i > 0 && !(T_list[i] > T_list[i - 1])) {
      throw std::invalid_argument("config: T_list must be strictly increasing");
    }
  }
  lambda.validate();
  if (lambda_alt) lambda_alt->validate();
}

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::ordered_json ExperimentReport::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = name;
  j["inputs"] = inputs;
  j["metrics"] = metrics;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  j["flags"] = flags;
  j["pass"] = passed();
  if (include_timing) j["wall_seconds"] = wall_seconds;
  return j;
}

nlohmann::ordered_json region_to_json(const Region& r) {
  nlohmann::ordered_json j;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Rect>) {
          j = {{"kind", "rect"}, {"xmin", s.xmin}, {"xmax", s.xmax}, {"ymin", s.ymin}, {"ymax", s.ymax}};
        } else if constexpr (std::is_same_v<S, Disk>) {
          j = {{"kind", "disk"}, {"cx", s.center.x}, {"cy", s.center.y}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<S, EmTriangle>) {
          j = {{"kind", "triangle"}, {"sigma", s.sigma}};
        } else {
          j = {{"kind", s->side == HalfPlane::kRight ? "right_half" : "left_half"},
               {"inner", region_to_json(s->inner)}};
        }
      },
      r.shape());
  return j;
}

std::string region_to_string(const Region& r) { return region_to_json(r).dump(); }

Stream experiment_stream(std::uint64_t seed, const std::string& tag, std::uint64_t k, std::uint64_t replica) {
  return Stream(seed ^ fnv1a(tag) ^ (0x9e3779b97f4a7c15ULL * (k + 1)), replica);
}

// ---------------------------------------------------------------------------

bool is_rational_point(Vec2 q, std::int64_t max_den, double tol) {
  auto rational = [&](double v) {
    for (std::int64_t d = 1; d <= max_den; ++d) {
      const double s = v * static_cast<double>(d);
      if (std::abs(s - std::nearbyint(s)) <= tol * static_cast<double>(d) * std::max(1.0, std::abs(v))) return true;
    }
    return false;
  };
  return rational(q.x) && rational(q.y);
}

Figure1Result run_figure1(std::int64_t n_max, Vec2 q, double radius, int bins, double lo, double hi) {
  if (n_max < 2) throw std::invalid_argument("figure1: n_max must be >= 2");
  Stopwatch clock;
  Figure1Result res;
  const GapSample sq = circular_gaps(frac_sqrt(n_max));
  const GapSample dir = circular_gaps(direction_fracs(q, radius, true));
  res.sqrt_scaled_gaps = sq.scaled_gaps;
  res.direction_scaled_gaps = dir.scaled_gaps;
  res.sqrt_hist = make_histogram(sq.scaled_gaps, bins, lo, hi);
  res.direction_hist = make_histogram(dir.scaled_gaps, bins, lo, hi);
  res.ks = ecdf_ks(sq.scaled_gaps, dir.scaled_gaps);

  auto& rep = res.report;
  rep.name = "figure1";
  rep.inputs = {{"n_max", n_max}, {"q", {q.x, q.y}}, {"radius", radius}, {"bins", bins}, {"lo", lo}, {"hi", hi}};
  rep.metrics.push_back({{"metric", "ks"}, {"value", res.ks}, {"n_sqrt", sq.n_points}, {"n_directions", dir.n_points}});
  rep.metrics.push_back({{"metric", "sqrt_histogram"}, {"counts", res.sqrt_hist.counts},
                         {"overflow", res.sqrt_hist.overflow}, {"n", sq.n_points}});
  rep.metrics.push_back({{"metric", "direction_histogram"}, {"counts", res.direction_hist.counts},
                         {"overflow", res.direction_hist.overflow}, {"n", dir.n_points}});
  rep.checks.push_back(make_check("ks_le_threshold", res.ks, kFigure1KsThreshold, res.ks <= kFigure1KsThreshold));
  if (is_rational_point(q)) {
    rep.flags.push_back("q in QZ^2: direction gaps need not follow the square-root gap law");
  }
  rep.wall_seconds = clock.seconds();
  return res;
}

// ---------------------------------------------------------------------------

std::vector<std::int64_t> theta_T_counts(double T, const Region& region, const LambdaLaw& lambda,
                                         std::uint64_t seed, std::uint64_t k, std::int64_t replicas) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(replicas));
  parallel_for(counts.size(), [&](std::size_t r) {
    Stream rng = experiment_stream(seed, "theta_T", k, r);
    const double theta = 2.0 * std::numbers::pi * lambda.sample(rng);
    counts[r] = static_cast<std::int64_t>(theta_T_count(T, theta, region));
  });
  return counts;
}

std::vector<std::int64_t> theta_counts(const Region& region, std::uint64_t seed, const std::string& tag,
                                       std::int64_t replicas) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(replicas));
  parallel_for(counts.size(), [&](std::size_t r) {
    Stream rng = experiment_stream(seed, tag, 0, r);
    counts[r] = static_cast<std::int64_t>(theta_count(sample_Y(rng).g, region));
  });
  return counts;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg, const Region& region) {
  cfg.validate();
  if (cfg.T_list.empty()) throw std::invalid_argument("converge: T_list is empty");
  Stopwatch clock;
  ConvergenceResult res;
  res.reference = counting_pmf(theta_counts(region, cfg.seed, "theta_mu", cfg.replicas));
  for (std::size_t i = 0; i < cfg.T_list.size(); ++i) {
    const double T = cfg.T_list[i];
    const auto counts = theta_T_counts(T, region, cfg.lambda, cfg.seed, i, cfg.replicas);
    res.per_T.push_back(counting_pmf(counts));
    res.tv.push_back(tv_distance(res.per_T.back(), res.reference));
    res.noise.push_back(tv_noise(res.per_T.back(), res.reference));
  }

  auto& rep = res.report;
  rep.name = "converge";
  rep.inputs = config_to_json(cfg);
  rep.inputs["region"] = region_to_json(region);
  rep.metrics.push_back({{"metric", "reference_pmf"}, {"pmf", pmf_to_json(res.reference)},
                         {"mean", mean(res.reference)}, {"n", res.reference.n_samples}});
  for (std::size_t i = 0; i < cfg.T_list.size(); ++i) {
    rep.metrics.push_back({{"metric", "tv"}, {"T", cfg.T_list[i]}, {"tv", res.tv[i]}, {"mc_noise", res.noise[i]},
                           {"mean", mean(res.per_T[i])}, {"n", res.per_T[i].n_samples},
                           {"n_reference", res.reference.n_samples}});
  }
  rep.checks.push_back(make_check("tv_at_largest_T", res.tv.back(), kConvergenceTvThreshold,
                                  res.tv.back() <= kConvergenceTvThreshold));
  bool monotone = true;
  double worst = 0.0;
  for (std::size_t i = 1; i < res.tv.size(); ++i) {
    const double slack = 2.0 * std::max(res.noise[i], res.noise[i - 1]);
    worst = std::max(worst, res.tv[i] - res.tv[i - 1] - slack);
    monotone = monotone && res.tv[i] <= res.tv[i - 1] + slack;
  }
  rep.checks.push_back(make_check("tv_nonincreasing_within_2_noise", worst, 0.0, monotone));
  rep.wall_seconds = clock.seconds();
  return res;
}

// ---------------------------------------------------------------------------

namespace {

struct JointCounts {
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
};

JointCounts equidist_lhs(double T, const Region& A, const Region& B, const LambdaLaw& lambda, std::uint64_t seed,
                         const std::string& tag, std::uint64_t k, std::int64_t replicas) {
  JointCounts c{std::vector<std::int64_t>(static_cast<std::size_t>(replicas)),
                std::vector<std::int64_t>(static_cast<std::size_t>(replicas))};
  parallel_for(c.a.size(), [&](std::size_t r) {
    Stream rng = experiment_stream(seed, tag, k, r);
    const double xi = lambda.sample(rng);
    const AffineMap g = compose(shear(xi), dilation(T));
    c.a[r] = static_cast<std::int64_t>(count_affine_lattice(g, {0.0, 0.0}, A));
    c.b[r] = static_cast<std::int64_t>(count_affine_lattice(g, kHalfShift, B));
  });
  return c;
}

JointCounts equidist_rhs(const Region& A, const Region& B, std::uint64_t seed, std::int64_t replicas) {
  JointCounts c{std::vector<std::int64_t>(static_cast<std::size_t>(replicas)),
                std::vector<std::int64_t>(static_cast<std::size_t>(replicas))};
  parallel_for(c.a.size(), [&](std::size_t r) {
    Stream rng = experiment_stream(seed, "equidist_mu", 0, r);
    const AffineMap g = sample_Y(rng).g;
    c.a[r] = static_cast<std::int64_t>(count_affine_lattice(g, {0.0, 0.0}, A));
    c.b[r] = static_cast<std::int64_t>(count_affine_lattice(g, kHalfShift, B));
  });
  return c;
}

}  // namespace

EquidistributionResult run_equidistribution(const ExperimentConfig& cfg, const Region& A, const Region& B) {
  cfg.validate();
  if (cfg.T_list.empty()) throw std::invalid_argument("equidist: T_list is empty");
  Stopwatch clock;
  EquidistributionResult res;
  const JointCounts rhs = equidist_rhs(A, B, cfg.seed, cfg.replicas);
  const JointPMF rhs_pmf = joint_pmf(rhs.a, rhs.b);
  auto& rep = res.report;
  rep.name = "equidist";
  rep.inputs = config_to_json(cfg);
  rep.inputs["region_a"] = region_to_json(A);
  rep.inputs["region_b"] = region_to_json(B);

  for (std::size_t i = 0; i < cfg.T_list.size(); ++i) {
    const double T = cfg.T_list[i];
    const JointCounts lhs = equidist_lhs(T, A, B, cfg.lambda, cfg.seed, "equidist_lambda", i, cfg.replicas);
    const JointPMF lhs_pmf = joint_pmf(lhs.a, lhs.b);
    res.tv.push_back(tv_distance(lhs_pmf, rhs_pmf));
    res.noise.push_back(tv_noise(lhs_pmf, rhs_pmf));
    nlohmann::ordered_json m{{"metric", "joint_tv"}, {"T", T}, {"tv", res.tv.back()}, {"mc_noise", res.noise.back()},
                             {"mean_a", estimate_mean_of(lhs.a).mean}, {"mean_b", estimate_mean_of(lhs.b).mean},
                             {"n", lhs.a.size()}, {"n_reference", rhs.a.size()}};
    if (cfg.lambda_alt) {
      const JointCounts alt =
          equidist_lhs(T, A, B, *cfg.lambda_alt, cfg.seed, "equidist_lambda_alt", i, cfg.replicas);
      const JointPMF alt_pmf = joint_pmf(alt.a, alt.b);
      res.tv_alt.push_back(tv_distance(lhs_pmf, alt_pmf));
      res.noise_alt.push_back(tv_noise(lhs_pmf, alt_pmf));
      m["tv_lambda_alt"] = res.tv_alt.back();
      m["mc_noise_lambda_alt"] = res.noise_alt.back();
    }
    rep.metrics.push_back(std::move(m));
  }
  rep.metrics.push_back({{"metric", "reference_means"}, {"mean_a", estimate_mean_of(rhs.a).mean},
                         {"mean_b", estimate_mean_of(rhs.b).mean}, {"n", rhs.a.size()}});
  rep.checks.push_back(make_check("joint_tv_at_largest_T", res.tv.back(), kEquidistributionTvThreshold,
                                  res.tv.back() <= kEquidistributionTvThreshold));
  if (cfg.lambda_alt) {
    const double limit = 2.0 * res.noise_alt.back();
    rep.checks.push_back(make_check("lambda_independence_within_2_noise", res.tv_alt.back(), limit,
                                    res.tv_alt.back() <= limit));
  }
  rep.wall_seconds = clock.seconds();
  return res;
}

// ---------------------------------------------------------------------------

double BatteryStat::z() const {
  return combined_se > 0.0 ? std::abs(theta_value - transformed_value) / combined_se
                           : (theta_value == transformed_value ? 0.0 : std::numeric_limits<double>::infinity());
}

bool in_subgroup_P(const AffineMap& h, double tol) {
  return std::abs(h.m().a21) <= tol && std::abs(h.t().x) <= tol;
}

namespace {

Rect preimage_box(const Rect& box, const AffineMap& h) {
  const AffineMap hi = inverse(h);
  Rect out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double x : {box.xmin, box.xmax}) {
    for (double y : {box.ymin, box.ymax}) {
      const Vec2 p = act({x, y}, hi);
      out.xmin = std::min(out.xmin, p.x), out.xmax = std::max(out.xmax, p.x);
      out.ymin = std::min(out.ymin, p.y), out.ymax = std::max(out.ymax, p.y);
    }
  }
  const double pad = 1e-9 * (1.0 + std::max({std::abs(out.xmin), std::abs(out.xmax), std::abs(out.ymin),
                                             std::abs(out.ymax)}));
  out.xmin -= pad, out.xmax += pad, out.ymin -= pad, out.ymax += pad;
  return out;
}

Rect union_box(const Rect& a, const Rect& b) {
  return {std::min(a.xmin, b.xmin), std::max(a.xmax, b.xmax), std::min(a.ymin, b.ymin), std::max(a.ymax, b.ymax)};
}

// Points of Theta h inside box, for Theta realized from g.
std::vector<Vec2> transformed_points(const AffineMap& g, const AffineMap& h, const Rect& box) {
  std::vector<Vec2> out;
  for (Vec2 p : theta_points(g, Region(preimage_box(box, h)))) {
    const Vec2 q = act(p, h);
    if (q.x >= box.xmin && q.x <= box.xmax && q.y >= box.ymin && q.y <= box.ymax) out.push_back(q);
  }
  return out;
}

std::int64_t count_in(const std::vector<Vec2>& pts, const Region& r) {
  return std::count_if(pts.begin(), pts.end(), [&](Vec2 p) { return r.contains(p); });
}

const Region kBatteryCountRegion(Rect{-1.0, 1.0, 0.0, 2.0});
const Region kBatteryUpper(Rect{0.1, 1.1, 0.1, 1.1});
const Region kBatteryLower(Rect{0.1, 1.1, -1.1, -0.1});
const Region kBatteryVoid(Rect{-1.0, 1.0, 0.0, 0.2});

struct ReplicaStats {
  std::int64_t count = 0;
  double battery_count = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  double void_indicator = 0.0;
  double exact_area_indicator = 0.0;
};

std::vector<ReplicaStats> invariance_replicas(const AffineMap& h, const Region& region, std::uint64_t seed,
                                              const std::string& tag, std::int64_t replicas) {
  Rect box = region.bounding_box();
  for (const Region* r : {&kBatteryCountRegion, &kBatteryUpper, &kBatteryLower, &kBatteryVoid}) {
    box = union_box(box, r->bounding_box());
  }
  std::vector<ReplicaStats> out(static_cast<std::size_t>(replicas));
  parallel_for(out.size(), [&](std::size_t r) {
    Stream rng = experiment_stream(seed, tag, 0, r);
    const auto pts = transformed_points(sample_Y(rng).g, h, box);
    ReplicaStats s;
    s.count = count_in(pts, region);
    const std::int64_t battery_count = count_in(pts, kBatteryCountRegion);
    s.battery_count = static_cast<double>(battery_count);
    s.exact_area_indicator = battery_count == 4 ? 1.0 : 0.0;
    s.upper = static_cast<double>(count_in(pts, kBatteryUpper));
    s.lower = static_cast<double>(count_in(pts, kBatteryLower));
    s.void_indicator = count_in(pts, kBatteryVoid) == 0 ? 1.0 : 0.0;
    out[r] = s;
  });
  return out;
}

}  // namespace

std::int64_t transformed_count(const AffineMap& g, const AffineMap& h, const Region& region) {
  return count_in(transformed_points(g, h, region.bounding_box()), region);
}

InvarianceResult run_invariance(const ExperimentConfig& cfg, const AffineMap& element, const Region& region) {
  cfg.validate();
  Stopwatch clock;
  InvarianceResult res;
  res.in_P = in_subgroup_P(element);
  // Both sides act on the same realizations of Theta.
  const auto base = invariance_replicas(AffineMap::identity(), region, cfg.seed, "invariance_theta", cfg.replicas);
  const auto moved = invariance_replicas(element, region, cfg.seed, "invariance_theta", cfg.replicas);

  auto column = [](const std::vector<ReplicaStats>& v, auto field) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(static_cast<double>(s.*field));
    return out;
  };
  std::vector<std::int64_t> c0, c1;
  for (const auto& s : base) c0.push_back(s.count);
  for (const auto& s : moved) c1.push_back(s.count);
  const CountingPMF p0 = counting_pmf(c0);
  const CountingPMF p1 = counting_pmf(c1);
  res.tv = tv_distance(p0, p1);
  res.tv_noise = tv_noise(p0, p1);

  // Both sides come from the same realizations, so each statistic is compared
  // through the per-replica difference of its influence values.
  auto paired = [](std::string name, double a, double b, const std::vector<double>& infl_a,
                   const std::vector<double>& infl_b) {
    std::vector<double> d(infl_a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = infl_a[i] - infl_b[i];
    return BatteryStat{std::move(name), a, b, estimate_mean(d).se};
  };
  auto centred_product = [](const std::vector<double>& u, const std::vector<double>& v) {
    const double mu = estimate_mean(u).mean, mv = estimate_mean(v).mean;
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = (u[i] - mu) * (v[i] - mv);
    return out;
  };
  auto mean_stat = [&](std::string name, double ReplicaStats::*field) {
    const auto a = column(base, field), b = column(moved, field);
    return paired(std::move(name), estimate_mean(a).mean, estimate_mean(b).mean, a, b);
  };

  const auto bc0 = column(base, &ReplicaStats::battery_count);
  const auto bc1 = column(moved, &ReplicaStats::battery_count);
  res.battery.push_back(paired("count_variance_rect[-1,1]x[0,2]", estimate_variance(bc0).mean,
                               estimate_variance(bc1).mean, centred_product(bc0, bc0), centred_product(bc1, bc1)));
  const auto up0 = column(base, &ReplicaStats::upper), lo0 = column(base, &ReplicaStats::lower);
  const auto up1 = column(moved, &ReplicaStats::upper), lo1 = column(moved, &ReplicaStats::lower);
  res.battery.push_back(paired("covariance_rect[0.1,1.1]^2_vs_mirror", estimate_covariance(up0, lo0).mean,
                               estimate_covariance(up1, lo1).mean, centred_product(up0, lo0),
                               centred_product(up1, lo1)));
  res.battery.push_back(mean_stat("void_probability_rect[-1,1]x[0,0.2]", &ReplicaStats::void_indicator));
  // A single affine lattice puts exactly area-many points in the square far
  // more often than two glued lattice pieces do.
  res.battery.push_back(mean_stat("P(count=4)_rect[-1,1]x[0,2]", &ReplicaStats::exact_area_indicator));

  auto& rep = res.report;
  rep.name = "invariance";
  rep.inputs = config_to_json(cfg);
  rep.inputs["region"] = region_to_json(region);
  const Mat2& m = element.m();
  rep.inputs["element"] = {{"matrix", {m.a11, m.a12, m.a21, m.a22}}, {"translation", {element.t().x, element.t().y}}};
  rep.inputs["in_P"] = res.in_P;
  rep.metrics.push_back({{"metric", "count_tv"}, {"tv", res.tv}, {"mc_noise", res.tv_noise},
                         {"mean_theta", mean(p0)}, {"mean_transformed", mean(p1)}, {"n", p0.n_samples}});
  double max_z = 0.0;
  for (const auto& b : res.battery) {
    rep.metrics.push_back({{"metric", b.name}, {"theta", b.theta_value}, {"transformed", b.transformed_value},
                           {"combined_se", b.combined_se}, {"z", b.z()}, {"n", cfg.replicas}});
    max_z = std::max(max_z, b.z());
  }
  if (res.in_P) {
    rep.checks.push_back(make_check("count_tv", res.tv, kInvarianceTvThreshold, res.tv <= kInvarianceTvThreshold));
    rep.checks.push_back(make_check("battery_max_z_not_significant", max_z, kSeparationSigmas,
                                    max_z <= kSeparationSigmas));
  } else {
    rep.checks.push_back(make_check("battery_max_z_separated", max_z, kSeparationSigmas, max_z > kSeparationSigmas));
  }
  rep.wall_seconds = clock.seconds();
  return res;
}

// ---------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LinearizationResult run_linearization(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& Ts = cfg.T_list;
  if (Ts.size() < 3) throw std::invalid_argument("linearize: T_list needs at least 3 entries");
  const double ratio = Ts[1] / Ts[0];
  for (std::size_t i = 1; i < Ts.size(); ++i) {
    if (std::abs(Ts[i] / Ts[i - 1] - ratio) > 1e-9 * ratio) {
      throw std::invalid_argument("linearize: T_list must be a geometric progression");
    }
  }
  const Region right = cfg.regions.size() > 0 ? cfg.regions[0] : Region(Rect{0.2, 1.2, -1.0, 1.0});
  const Region left = cfg.regions.size() > 1 ? cfg.regions[1] : Region(Rect{-1.2, -0.2, -1.0, 1.0});
  Stopwatch clock;

  // xi draws shared by every T, redrawn while within the excluded band.
  std::vector<double> xis;
  for (std::int64_t r = 0; r < cfg.replicas; ++r) {
    Stream rng = experiment_stream(cfg.seed, "linearize_xi", 0, static_cast<std::uint64_t>(r));
    double xi;
    do {
      xi = cfg.lambda.sample(rng);
    } while (std::abs(xi - std::nearbyint(xi)) <= kXiExclusion);
    xis.push_back(xi);
  }

  LinearizationResult res;
  auto& rep = res.report;
  rep.name = "linearize";
  rep.inputs = config_to_json(cfg);
  rep.inputs["region_right"] = region_to_json(right);
  rep.inputs["region_left"] = region_to_json(left);
  std::vector<double> combined;
  for (double T : Ts) {
    std::vector<MatchReport> rr(xis.size()), ll(xis.size());
    parallel_for(xis.size(), [&](std::size_t i) {
      rr[i] = match_right(T, xis[i], right);
      ll[i] = match_left(T, xis[i], left);
    });
    double sr = 0, sl = 0;
    std::int64_t unmatched = 0, matched = 0, excluded = 0;
    for (std::size_t i = 0; i < xis.size(); ++i) {
      sr += rr[i].max_displacement;
      sl += ll[i].max_displacement;
      unmatched += rr[i].n_unmatched_spiral + rr[i].n_unmatched_lattice + ll[i].n_unmatched_spiral +
                   ll[i].n_unmatched_lattice;
      matched += rr[i].n_matched + ll[i].n_matched;
      excluded += rr[i].n_boundary_excluded + ll[i].n_boundary_excluded;
    }
    const double n = static_cast<double>(xis.size());
    res.mean_right.push_back(sr / n);
    res.mean_left.push_back(sl / n);
    combined.push_back(0.5 * (sr + sl) / n);
    res.unmatched += unmatched;
    rep.metrics.push_back({{"metric", "displacement"}, {"T", T}, {"mean_max_displacement_right", sr / n},
                           {"mean_max_displacement_left", sl / n}, {"matched", matched},
                           {"unmatched", unmatched}, {"boundary_excluded", excluded}, {"n", xis.size()}});
  }
  res.slope = loglog_slope(Ts, combined);
  rep.metrics.push_back({{"metric", "loglog_slope"}, {"value", res.slope}, {"n", Ts.size()}});
  rep.checks.push_back(make_check("unmatched_after_boundary_exclusion", static_cast<double>(res.unmatched), 0.0,
                                  res.unmatched == 0));
  rep.checks.push_back(make_check("slope_in_[-1.3,-0.7]", res.slope, -1.0, res.slope >= kSlopeLo && res.slope <= kSlopeHi));
  rep.wall_seconds = clock.seconds();
  return res;
}

}  // namespace latstat
