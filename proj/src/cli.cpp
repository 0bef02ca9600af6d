#include "latstat/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "latstat/haar.hpp"
#include "latstat/io.hpp"
#include "latstat/parallel.hpp"
#include "latstat/sequences.hpp"

namespace latstat {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("not a finite number: '" + s + "'");
  return v;
}

std::pair<std::string, std::vector<double>> kind_and_args(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, {}};
  return {text.substr(0, colon), parse_reals(text.substr(colon + 1))};
}

void expect_args(const std::string& what, const std::vector<double>& args, std::size_t n) {
  if (args.size() != n) {
    throw std::invalid_argument(what + " takes " + std::to_string(n) + " numbers, got " + std::to_string(args.size()));
  }
}

struct Common {
  std::uint64_t seed = 1;
  bool timing = false;
};

// Prints or writes the report, and a one-line summary on stderr.
void emit(const ExperimentReport& rep, const std::string& out, const Common& common) {
  const auto j = rep.to_json(common.timing);
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(out, j);
  }
  std::cerr << rep.name << ": " << (rep.passed() ? "pass" : "FAIL") << " (" << rep.wall_seconds << " s)\n";
}

ExperimentConfig make_config(const Common& common, std::int64_t replicas, const std::vector<double>& Ts,
                             const std::string& lambda) {
  ExperimentConfig cfg;
  cfg.seed = common.seed;
  cfg.replicas = replicas;
  cfg.T_list = Ts;
  cfg.lambda = parse_lambda(lambda);
  cfg.validate();
  return cfg;
}

std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw std::invalid_argument("'" + path + "' is empty");
  const auto header = split(line, ',');
  std::size_t idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) idx = i;
  }
  if (idx == header.size()) throw std::invalid_argument("column '" + column + "' not found in '" + path + "'");
  std::vector<double> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (idx >= cells.size()) throw std::invalid_argument("short row in '" + path + "'");
    out.push_back(parse_real(cells[idx]));
  }
  return out;
}

}  // namespace

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& s : split(text, ',')) out.push_back(parse_real(s));
  return out;
}

Region parse_region(const std::string& text) {
  const auto [kind, a] = kind_and_args(text);
  if (kind == "rect") {
    expect_args("rect", a, 4);
    if (!(a[0] < a[1] && a[2] < a[3])) throw std::invalid_argument("rect: zero or negative area");
    return Region(Rect{a[0], a[1], a[2], a[3]});
  }
  if (kind == "disk") {
    expect_args("disk", a, 3);
    if (!(a[2] > 0.0)) throw std::invalid_argument("disk: radius must be positive");
    return Region(Disk{{a[0], a[1]}, a[2]});
  }
  if (kind == "tri") {
    expect_args("tri", a, 1);
    if (!(a[0] > 0.0)) throw std::invalid_argument("tri: sigma must be positive");
    return Region(EmTriangle{a[0]});
  }
  throw std::invalid_argument("unknown region '" + text + "' (rect:, disk:, tri:)");
}

AffineMap parse_element(const std::string& text) {
  const auto [kind, a] = kind_and_args(text);
  if (kind == "shear") {
    expect_args("shear", a, 1);
    return AffineMap::linear({1.0, a[0], 0.0, 1.0});
  }
  if (kind == "scale") {
    expect_args("scale", a, 1);
    if (a[0] == 0.0) throw std::invalid_argument("scale: factor must be nonzero");
    return AffineMap::linear({a[0], 0.0, 0.0, 1.0 / a[0]});
  }
  if (kind == "translate") {
    expect_args("translate", a, 2);
    return AffineMap::translation({a[0], a[1]});
  }
  if (kind == "neg") {
    expect_args("neg", a, 0);
    return AffineMap::linear({-1.0, 0.0, 0.0, -1.0});
  }
  if (kind == "rot") {
    expect_args("rot", a, 1);
    return rotation(a[0]);
  }
  if (kind == "affine") {
    expect_args("affine", a, 6);
    return AffineMap({a[0], a[1], a[2], a[3]}, {a[4], a[5]});
  }
  throw std::invalid_argument("unknown element '" + text + "' (shear:, scale:, translate:, neg, rot:, affine:)");
}

LambdaLaw parse_lambda(const std::string& text) {
  const auto [kind, a] = kind_and_args(text);
  if (kind == "uniform") {
    expect_args("uniform", a, 0);
    return LambdaLaw::uniform();
  }
  if (kind == "interval") {
    expect_args("interval", a, 2);
    return LambdaLaw::interval(a[0], a[1]);
  }
  if (kind == "triangular") {
    expect_args("triangular", a, 0);
    return LambdaLaw::triangular();
  }
  if (kind == "table") return LambdaLaw::density_table(a);
  throw std::invalid_argument("unknown lambda '" + text + "' (uniform, interval:, triangular, table:)");
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Statistics of sqrt(n) mod 1, random affine lattices and the spiral point set"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value config file; subcommand keys go under [subcommand]");
  Common common;
  app.add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  app.add_flag("--timing", common.timing, "include wall time in JSON reports");

  std::function<void()> action;

  // gaps-sqrt
  auto* gs = app.add_subcommand("gaps-sqrt", "gaps of n^beta mod 1, n = 1..N");
  std::int64_t gs_n = 0;
  double gs_beta = 0.5;
  std::string gs_out;
  gs->add_option("--n", gs_n, "N")->required();
  gs->add_option("--beta", gs_beta, "exponent in (0, 1)")->capture_default_str();
  gs->add_option("--out", gs_out, "CSV path (stdout if omitted)");
  gs->callback([&] {
    action = [&] {
      const auto g = circular_gaps(frac_power(gs_n, gs_beta));
      const auto csv = gaps_csv(g);
      if (gs_out.empty()) std::cout << csv; else write_file(gs_out, csv);
    };
  });

  // gaps-directions
  auto* gd = app.add_subcommand("gaps-directions", "gaps of directions of Z^2 - q inside a disk");
  std::string gd_q = "1.4142135623730951,0";
  double gd_radius = 70.0;
  bool gd_full = false;
  std::string gd_out;
  gd->add_option("--q", gd_q, "observer x,y")->capture_default_str();
  gd->add_option("--radius", gd_radius, "disk radius")->capture_default_str();
  gd->add_flag("--full-plane", gd_full, "all directions (default: upper half plane)");
  gd->add_option("--out", gd_out, "CSV path (stdout if omitted)");
  gd->callback([&] {
    action = [&] {
      const auto q = parse_reals(gd_q);
      if (q.size() != 2) throw std::invalid_argument("--q takes x,y");
      const auto g = circular_gaps(direction_fracs({q[0], q[1]}, gd_radius, !gd_full));
      const auto csv = gaps_csv(g);
      if (gd_out.empty()) std::cout << csv; else write_file(gd_out, csv);
    };
  });

  // figure1
  auto* f1 = app.add_subcommand("figure1", "square-root gaps against lattice direction gaps");
  std::int64_t f1_n = 7765;
  std::string f1_q = "1.4142135623730951,0";
  double f1_radius = 70.0;
  int f1_bins = 50;
  std::string f1_out, f1_csv, f1_svg;
  f1->add_option("--n", f1_n, "N for sqrt(n)")->capture_default_str();
  f1->add_option("--q", f1_q, "observer x,y")->capture_default_str();
  f1->add_option("--radius", f1_radius, "disk radius")->capture_default_str();
  f1->add_option("--bins", f1_bins, "bins on [0, 3)")->capture_default_str();
  f1->add_option("--out", f1_out, "JSON report");
  f1->add_option("--csv", f1_csv, "histograms CSV (panel,bin_lo,bin_hi,count)");
  f1->add_option("--svg", f1_svg, "SVG of both histograms");
  f1->callback([&] {
    action = [&] {
      const auto q = parse_reals(f1_q);
      if (q.size() != 2) throw std::invalid_argument("--q takes x,y");
      if (f1_bins < 1) throw std::invalid_argument("--bins must be >= 1");
      const auto res = run_figure1(f1_n, {q[0], q[1]}, f1_radius, f1_bins);
      if (!f1_csv.empty()) {
        std::string csv = "panel,bin_lo,bin_hi,count\n";
        for (const auto& [name, h] : {std::pair{"sqrt", &res.sqrt_hist}, std::pair{"directions", &res.direction_hist}}) {
          for (std::size_t i = 0; i < h->counts.size(); ++i) {
            csv += std::string(name) + ',' + format_real(h->bin_edges[i]) + ',' + format_real(h->bin_edges[i + 1]) +
                   ',' + std::to_string(h->counts[i]) + '\n';
          }
        }
        write_file(f1_csv, csv);
      }
      if (!f1_svg.empty()) {
        write_file(f1_svg, histograms_svg(res.sqrt_hist, res.direction_hist, "sqrt(n) mod 1, N=" + std::to_string(f1_n),
                                          "directions of Z^2 - q"));
      }
      emit(res.report, f1_out, common);
    };
  });

  // sample-theta
  auto* st = app.add_subcommand("sample-theta", "realizations of the limit process");
  std::int64_t st_replicas = 1;
  std::vector<std::string> st_regions{"rect:-3,3,-3,3"};
  std::string st_out, st_points, st_svg;
  st->add_option("--replicas", st_replicas, "number of samples")->capture_default_str();
  st->add_option("--region", st_regions, "regions (repeatable)")->capture_default_str();
  st->add_option("--out", st_out, "counts CSV replica,region_id,count (stdout if omitted)");
  st->add_option("--points", st_points, "CSV x,y of replica 0 in the first region");
  st->add_option("--svg", st_svg, "scatter plot of replica 0");
  st->callback([&] {
    action = [&] {
      if (st_replicas < 1) throw std::invalid_argument("--replicas must be >= 1");
      std::vector<Region> regions;
      for (const auto& r : st_regions) regions.push_back(parse_region(r));
      std::vector<CountRow> rows(static_cast<std::size_t>(st_replicas) * regions.size());
      parallel_for(static_cast<std::size_t>(st_replicas), [&](std::size_t r) {
        Stream rng = experiment_stream(common.seed, "sample_theta", 0, r);
        const AffineMap g = sample_Y(rng).g;
        for (std::size_t k = 0; k < regions.size(); ++k) {
          rows[r * regions.size() + k] = {static_cast<std::int64_t>(r), static_cast<std::int64_t>(k),
                                          static_cast<std::int64_t>(theta_count(g, regions[k]))};
        }
      });
      const auto csv = counts_csv(rows);
      if (st_out.empty()) std::cout << csv; else write_file(st_out, csv);
      if (!st_points.empty() || !st_svg.empty()) {
        Stream rng = experiment_stream(common.seed, "sample_theta", 0, 0);
        const auto pts = theta_points(sample_Y(rng).g, regions.front());
        if (!st_points.empty()) {
          std::string p = "x,y\n";
          for (Vec2 v : pts) p += format_real(v.x) + ',' + format_real(v.y) + '\n';
          write_file(st_points, p);
        }
        if (!st_svg.empty()) write_file(st_svg, scatter_svg(pts, regions.front().bounding_box(), "Theta, replica 0"));
      }
    };
  });

  // converge
  auto* cv = app.add_subcommand("converge", "counting PMFs of Theta_T against Theta");
  std::vector<double> cv_T{100, 1000, 10000};
  std::string cv_region = "rect:-1,1,-1,1", cv_lambda = "uniform", cv_out;
  std::int64_t cv_replicas = 10000;
  cv->add_option("--T", cv_T, "increasing T values")->delimiter(',')->capture_default_str();
  cv->add_option("--region", cv_region, "test region")->capture_default_str();
  cv->add_option("--lambda", cv_lambda, "law of theta / 2 pi")->capture_default_str();
  cv->add_option("--replicas", cv_replicas, "samples per side")->capture_default_str();
  cv->add_option("--out", cv_out, "JSON report (stdout if omitted)");
  cv->callback([&] {
    action = [&] {
      const auto cfg = make_config(common, cv_replicas, cv_T, cv_lambda);
      emit(run_convergence(cfg, parse_region(cv_region)).report, cv_out, common);
    };
  });

  // equidist
  auto* eq = app.add_subcommand("equidist", "joint counts along the expanding horocycle against Haar samples");
  std::vector<double> eq_T{10000};
  std::string eq_a = "rect:0.1,1.1,-1,1", eq_b = "rect:-1.1,-0.1,-1,1", eq_lambda = "uniform",
              eq_alt, eq_out;
  std::int64_t eq_replicas = 10000;
  eq->add_option("--T", eq_T, "increasing T values")->delimiter(',')->capture_default_str();
  eq->add_option("--region-a", eq_a, "region for Z^2 N(xi) D(T)")->capture_default_str();
  eq->add_option("--region-b", eq_b, "region for (Z^2 + (1/2,-1/4)) N(xi) D(T)")->capture_default_str();
  eq->add_option("--lambda", eq_lambda, "law of xi")->capture_default_str();
  eq->add_option("--lambda-alt", eq_alt, "second law of xi to compare against");
  eq->add_option("--replicas", eq_replicas, "samples per side")->capture_default_str();
  eq->add_option("--out", eq_out, "JSON report (stdout if omitted)");
  eq->callback([&] {
    action = [&] {
      auto cfg = make_config(common, eq_replicas, eq_T, eq_lambda);
      if (!eq_alt.empty()) cfg.lambda_alt = parse_lambda(eq_alt);
      emit(run_equidistribution(cfg, parse_region(eq_a), parse_region(eq_b)).report, eq_out, common);
    };
  });

  // invariance
  auto* iv = app.add_subcommand("invariance", "Theta against Theta h for an affine map h");
  std::string iv_element = "rot:1.5707963267948966", iv_region = "rect:-1,1,0,2", iv_out;
  std::int64_t iv_replicas = 20000;
  iv->add_option("--element", iv_element, "shear:b, scale:a, translate:x,y, neg, rot:theta, affine:...")
      ->capture_default_str();
  iv->add_option("--region", iv_region, "test region")->capture_default_str();
  iv->add_option("--replicas", iv_replicas, "samples per side")->capture_default_str();
  iv->add_option("--out", iv_out, "JSON report (stdout if omitted)");
  iv->callback([&] {
    action = [&] {
      const auto cfg = make_config(common, iv_replicas, {}, "uniform");
      emit(run_invariance(cfg, parse_element(iv_element), parse_region(iv_region)).report, iv_out, common);
    };
  });

  // linearize
  auto* ln = app.add_subcommand("linearize", "matching Theta_T to its linearized lattices");
  std::vector<double> ln_T{1000, 2000, 4000};
  std::string ln_right = "rect:0.2,1.2,-1,1", ln_left = "rect:-1.2,-0.2,-1,1",
              ln_lambda = "uniform", ln_out;
  std::int64_t ln_replicas = 20;
  ln->add_option("--T", ln_T, "geometric T progression, >= 3 entries")->delimiter(',')->capture_default_str();
  ln->add_option("--region-right", ln_right, "region in x > 0")->capture_default_str();
  ln->add_option("--region-left", ln_left, "region in x < 0")->capture_default_str();
  ln->add_option("--lambda", ln_lambda, "law of xi")->capture_default_str();
  ln->add_option("--replicas", ln_replicas, "xi draws")->capture_default_str();
  ln->add_option("--out", ln_out, "JSON report (stdout if omitted)");
  ln->callback([&] {
    action = [&] {
      auto cfg = make_config(common, ln_replicas, ln_T, ln_lambda);
      cfg.regions = {parse_region(ln_right), parse_region(ln_left)};
      emit(run_linearization(cfg).report, ln_out, common);
    };
  });

  // hist
  auto* hs = app.add_subcommand("hist", "histogram of one CSV column");
  std::string hs_in, hs_column = "scaled_gap", hs_out, hs_svg;
  int hs_bins = 50;
  double hs_lo = 0.0, hs_hi = 3.0;
  hs->add_option("--in", hs_in, "input CSV")->required();
  hs->add_option("--column", hs_column, "column name")->capture_default_str();
  hs->add_option("--bins", hs_bins, "number of bins")->capture_default_str();
  hs->add_option("--lo", hs_lo, "lower edge")->capture_default_str();
  hs->add_option("--hi", hs_hi, "upper edge")->capture_default_str();
  hs->add_option("--out", hs_out, "CSV bin_lo,bin_hi,count (stdout if omitted)");
  hs->add_option("--svg", hs_svg, "SVG rendering");
  hs->callback([&] {
    action = [&] {
      if (hs_bins < 1 || !(hs_lo < hs_hi)) throw std::invalid_argument("hist: need bins >= 1 and lo < hi");
      const auto h = make_histogram(read_csv_column(hs_in, hs_column), hs_bins, hs_lo, hs_hi);
      const auto csv = histogram_csv(h);
      if (hs_out.empty()) std::cout << csv; else write_file(hs_out, csv);
      if (!hs_svg.empty()) write_file(hs_svg, histogram_svg(h, hs_column + " from " + hs_in));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (action) action();
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (cusp_sample_count() > 0) {
    std::cerr << "note: " << cusp_sample_count() << " sample(s) with y > " << kCuspWarning << "\n";
  }
  return 0;
}

}  // namespace latstat
