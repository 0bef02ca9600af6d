// Acceptance run: one PASS/FAIL line per criterion, with the measured value,
// its tolerance and the wall time against the time budget.
//
// Exit status is 0 when every criterion ran to completion; with --strict it
// is 1 if any criterion failed. Outputs land in ./acceptance_out.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "latstat/experiments.hpp"
#include "latstat/haar.hpp"
#include "latstat/io.hpp"
#include "latstat/parallel.hpp"
#include "latstat/sequences.hpp"
#include "latstat/spiral.hpp"

using namespace latstat;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome spiral_density() {
  // Membership is tested geometrically on a pool that reaches past R = 200.
  const auto pool = spiral_points(202.0);
  std::int64_t worst = 0;
  for (int R = 1; R <= 200; ++R) {
    const Region disk(Disk{{0.0, 0.0}, static_cast<double>(R)});
    std::int64_t n = 0;
    for (const auto& sp : pool) n += disk.contains(sp.p) ? 1 : 0;
    const auto expect = static_cast<std::int64_t>(std::floor(std::numbers::pi * R * R));
    worst = std::max(worst, std::abs(n - expect));
  }
  return {worst == 0, fmt("max |#(P in Disk(R)) - floor(pi R^2)| over R=1..200 = %lld (need 0)",
                          static_cast<long long>(worst))};
}

Outcome figure1() {
  const auto res = run_figure1(7765, {std::numbers::sqrt2, 0.0}, 70.0, 50, 0.0, 3.0);
  std::filesystem::create_directories("acceptance_out");
  write_file("acceptance_out/figure1_sqrt_hist.csv", histogram_csv(res.sqrt_hist));
  write_file("acceptance_out/figure1_direction_hist.csv", histogram_csv(res.direction_hist));
  write_file("acceptance_out/figure1.svg", histograms_svg(res.sqrt_hist, res.direction_hist, "sqrt(n) mod 1, N=7765",
                                                          "directions, (m - sqrt 2)^2 + n^2 < 4900"));
  const bool emitted = res.sqrt_hist.counts.size() == 50 && res.direction_hist.counts.size() == 50;
  return {res.ks <= kFigure1KsThreshold && emitted,
          fmt("KS = %.4f (<= 0.05), N_sqrt = %zu, N_dir = %zu, histograms %s", res.ks,
              res.sqrt_scaled_gaps.size(), res.direction_scaled_gaps.size(), emitted ? "written" : "missing")};
}

std::int64_t count_in_region(const std::vector<Vec2>& pts, const Region& r) {
  std::int64_t n = 0;
  for (Vec2 p : pts) n += r.contains(p) ? 1 : 0;
  return n;
}

std::vector<std::vector<Vec2>> theta_samples(const Region& window, const std::string& tag, std::int64_t n) {
  std::vector<std::vector<Vec2>> out(static_cast<std::size_t>(n));
  parallel_for(out.size(), [&](std::size_t r) {
    Stream rng = experiment_stream(kSeed, tag, 0, r);
    out[r] = theta_points(sample_Y(rng).g, window);
  });
  return out;
}

Outcome intensity() {
  const std::vector<Region> regions{Region(Rect{-1, 1, -1, 1}), Region(Rect{0.2, 1.2, 0, 1}),
                                    Region(Rect{-1.2, -0.2, 0, 1})};
  const auto samples = theta_samples(Region(Rect{-1.2, 1.2, -1, 1}), "accept_intensity", 20000);
  bool pass = true;
  std::string detail;
  for (const auto& r : regions) {
    std::vector<double> c;
    for (const auto& pts : samples) c.push_back(static_cast<double>(count_in_region(pts, r)));
    const auto est = estimate_mean(c);
    const double z = std::abs(est.mean - r.area()) / est.se;
    pass = pass && z <= 3.0;
    detail += fmt("%s mean %.4f area %.1f z %.2f; ", region_to_string(r).c_str(), est.mean, r.area(), z);
  }
  return {pass, detail + "(need z <= 3)"};
}

Outcome two_point() {
  const Region A(Rect{0.2, 1.2, 0, 1}), B(Rect{-1.2, -0.2, 0, 1});
  const auto samples = theta_samples(Region(Rect{-1.2, 1.2, 0, 1}), "accept_pairs", 20000);
  std::vector<double> pairs;
  for (const auto& pts : samples) pairs.push_back(static_cast<double>(pair_count(pts, A, B)));
  const auto est = estimate_mean(pairs);
  const double z = std::abs(est.mean - 1.0) / est.se;
  return {z <= 3.0, fmt("mean pairs %.4f, SE %.4f, target 1, z %.2f (need <= 3)", est.mean, est.se, z)};
}

Outcome convergence() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.replicas = 10000;
  cfg.T_list = {1e2, 1e3, 1e4};
  const auto res = run_convergence(cfg, Region(Rect{-1, 1, -1, 1}));
  write_json("acceptance_out/converge.json", res.report.to_json());
  std::string detail;
  for (std::size_t i = 0; i < res.tv.size(); ++i) {
    detail += fmt("T=%g TV %.4f (noise %.4f); ", cfg.T_list[i], res.tv[i], res.noise[i]);
  }
  for (const auto& c : res.report.checks) detail += fmt("%s %s; ", c.name.c_str(), c.pass ? "ok" : "failed");
  return {res.report.passed(), detail + "(need TV(1e4) <= 0.05)"};
}

Outcome linearization() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.replicas = 20;
  cfg.T_list = {1e3, 2e3, 4e3};
  const auto res = run_linearization(cfg);
  write_json("acceptance_out/linearize.json", res.report.to_json());
  return {res.report.passed(), fmt("unmatched %lld (need 0), slope %.3f (need [-1.3, -0.7])",
                                   static_cast<long long>(res.unmatched), res.slope)};
}

Outcome invariance() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.replicas = 20000;
  const Region region(Rect{-1, 1, 0, 2});
  const std::vector<std::pair<std::string, AffineMap>> elements{
      {"shear(0.3)", AffineMap::linear({1, 0.3, 0, 1})},
      {"scale(2)", AffineMap::linear({2, 0, 0, 0.5})},
      {"translation(0,0.37)", AffineMap::translation({0, 0.37})},
      {"-I", AffineMap::linear({-1, 0, 0, -1})},
      {"k(pi/2)", rotation(std::numbers::pi / 2)}};
  bool pass = true;
  std::string detail;
  for (const auto& [name, h] : elements) {
    const auto res = run_invariance(cfg, h, region);
    double max_z = 0.0;
    for (const auto& b : res.battery) max_z = std::max(max_z, b.z());
    if (res.in_P) {
      pass = pass && res.tv <= kInvarianceTvThreshold;
      detail += fmt("%s TV %.4f max z %.2f; ", name.c_str(), res.tv, max_z);
    } else {
      pass = pass && max_z > kSeparationSigmas;
      detail += fmt("%s max battery z %.2f; ", name.c_str(), max_z);
    }
  }
  return {pass, detail + "(need TV <= 0.02 on P, z > 3 for k(pi/2))"};
}

Outcome equidistribution() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.replicas = 10000;
  cfg.T_list = {1e4};
  cfg.lambda_alt = LambdaLaw::triangular();
  const auto res = run_equidistribution(cfg, Region(Rect{0.1, 1.1, -1, 1}), Region(Rect{-1.1, -0.1, -1, 1}));
  write_json("acceptance_out/equidist.json", res.report.to_json());
  return {res.report.passed(),
          fmt("joint TV %.4f (noise %.4f, need <= 0.05); uniform vs triangular TV %.4f (need <= 2 x %.4f)",
              res.tv[0], res.noise[0], res.tv_alt[0], res.noise_alt[0])};
}

Outcome group_oracles() {
  const std::size_t order = enumerate_sl2_mod(4).size();
  const std::size_t cosets = coset_table().reps.size();

  double hom_err = 0.0, shift_err = 0.0;
  Stream rng(kSeed, 9);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(), b = rng.uniform();
    const AffineMap lhs = compose(shear(a), shear(b)), rhs = shear(a + b);
    hom_err = std::max({hom_err, std::abs(lhs.m().a12 - rhs.m().a12), std::abs(lhs.t().x - rhs.t().x),
                        std::abs(lhs.t().y - rhs.t().y)});
    const AffineMap B = compose(compose(AffineMap::translation({0.5, -0.25}), shear(a)), inverse(shear(a - 0.5)));
    for (double v : {B.m().a11, B.m().a12, B.m().a21, B.m().a22, B.t().x, B.t().y}) {
      shift_err = std::max(shift_err, std::abs(v - std::nearbyint(v)));
    }
  }

  constexpr int kGrid = 10;
  auto cell = [](double x, double y) {
    const int i = std::min(kGrid - 1, static_cast<int>((x + 0.5) * kGrid));
    const int j = std::min(kGrid - 1, static_cast<int>((1.0 / y - 0.02) / (1.0 / std::sqrt(0.75) - 0.02) * kGrid));
    return static_cast<std::size_t>(i * kGrid + j);
  };
  std::vector<std::int64_t> sampled(kGrid * kGrid, 0), oracle(kGrid * kGrid, 0);
  Stream s1(kSeed, 1), s2(kSeed, 2);
  for (int n = 0; n < 100000;) {
    const auto f = sample_frame(s1);
    if (f.y > 50.0) continue;
    ++sampled[cell(f.x, f.y)];
    ++n;
  }
  for (int n = 0; n < 100000;) {
    const double x = s2.uniform() - 0.5;
    const double y = 1.0 / (0.02 + 1.98 * s2.uniform());
    if (x * x + y * y < 1.0) continue;
    ++oracle[cell(x, y)];
    ++n;
  }
  const auto chi = chi_square_two_sample(sampled, oracle);
  const bool pass = order == 48 && cosets == 24 && hom_err <= 1e-9 && shift_err <= 1e-9 && chi.p_value > 0.01;
  return {pass, fmt("|SL(2,Z/4)| = %zu, cosets = %zu, N hom err %.1e, shift identity err %.1e, chi2 p = %.3f",
                    order, cosets, hom_err, shift_err, chi.p_value)};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  std::filesystem::create_directories("acceptance_out");
  const std::vector<Criterion> criteria{
      {1, "spiral density", 1.0, spiral_density},
      {2, "Figure 1 gap histograms", 10.0, figure1},
      {3, "Lebesgue intensity", 120.0, intensity},
      {4, "Poisson two-point function", 120.0, two_point},
      {5, "convergence of Theta_T", 300.0, convergence},
      {6, "linearization decay", 120.0, linearization},
      {7, "P-invariance and rotation", 300.0, invariance},
      {8, "equidistribution", 300.0, equidistribution},
      {9, "group and sampler oracles", 60.0, group_oracles},
  };
  std::printf("acceptance: seed %llu, %u worker thread(s)\n", static_cast<unsigned long long>(kSeed), worker_count());
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("[%s] criterion %d, %s: %s; time %.2f s (< %g s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return strict && failed > 0 ? 1 : 0;
}
