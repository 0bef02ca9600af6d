#include "latstat/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace latstat {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 50.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_open() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
         "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
}

// Draws h into the box [x0, x0 + w] x [y0, y0 + hgt].
void draw_histogram(std::ostringstream& os, const Histogram& h, const std::string& title, double x0, double y0,
                    double w, double hgt) {
  os << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 - 10) << "\" font-family=\"sans-serif\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(hgt)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (h.counts.empty() || h.total == 0) return;
  const double lo = h.bin_edges.front();
  const double hi = h.bin_edges.back();
  // Density scale so panels with different totals are comparable.
  double peak = 0.0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double width = h.bin_edges[i + 1] - h.bin_edges[i];
    peak = std::max(peak, static_cast<double>(h.counts[i]) / (static_cast<double>(h.total) * width));
  }
  if (peak <= 0.0) return;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double width = h.bin_edges[i + 1] - h.bin_edges[i];
    const double dens = static_cast<double>(h.counts[i]) / (static_cast<double>(h.total) * width);
    const double bx = x0 + w * (h.bin_edges[i] - lo) / (hi - lo);
    const double bw = w * width / (hi - lo);
    const double bh = hgt * dens / (1.1 * peak);
    os << "<rect x=\"" << fmt(bx) << "\" y=\"" << fmt(y0 + hgt - bh) << "\" width=\"" << fmt(bw)
       << "\" height=\"" << fmt(bh) << "\" fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  os << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 + hgt + 16)
     << "\" font-family=\"sans-serif\" font-size=\"11\">" << format_real(lo) << "</text>\n";
  os << "<text x=\"" << fmt(x0 + w) << "\" y=\"" << fmt(y0 + hgt + 16)
     << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << format_real(hi) << "</text>\n";
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string gaps_csv(const GapSample& g) {
  std::string out = "n,xi,gap,scaled_gap\n";
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_real(g.values[i]) + ',' + format_real(g.gaps[i]) + ',' +
           format_real(g.scaled_gaps[i]) + '\n';
  }
  return out;
}

std::string counts_csv(const std::vector<CountRow>& rows) {
  std::string out = "replica,region_id,count\n";
  for (const auto& r : rows) {
    out += std::to_string(r.replica) + ',' + std::to_string(r.region_id) + ',' + std::to_string(r.count) + '\n';
  }
  return out;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += format_real(h.bin_edges[i]) + ',' + format_real(h.bin_edges[i + 1]) + ',' + std::to_string(h.counts[i]) +
           '\n';
  }
  return out;
}

std::string histogram_svg(const Histogram& h, const std::string& title) {
  std::ostringstream os;
  os << svg_open();
  draw_histogram(os, h, title, kMargin, kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin);
  os << "</svg>\n";
  return os.str();
}

std::string histograms_svg(const Histogram& a, const Histogram& b, const std::string& title_a,
                           const std::string& title_b) {
  std::ostringstream os;
  os << svg_open();
  const double w = (kWidth - 3 * kMargin) / 2;
  draw_histogram(os, a, title_a, kMargin, kMargin, w, kHeight - 2 * kMargin);
  draw_histogram(os, b, title_b, 2 * kMargin + w, kMargin, w, kHeight - 2 * kMargin);
  os << "</svg>\n";
  return os.str();
}

std::string scatter_svg(const std::vector<Vec2>& points, const Rect& window, const std::string& title) {
  std::ostringstream os;
  os << svg_open();
  const double side = std::min(kWidth, kHeight) - 2 * kMargin;
  const double x0 = (kWidth - side) / 2;
  const double y0 = kMargin;
  const double sx = side / (window.xmax - window.xmin);
  const double sy = side / (window.ymax - window.ymin);
  os << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 - 10) << "\" font-family=\"sans-serif\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(side) << "\" height=\""
     << fmt(side) << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (window.xmin < 0.0 && window.xmax > 0.0) {
    const double ax = x0 - window.xmin * sx;
    os << "<line x1=\"" << fmt(ax) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(ax) << "\" y2=\"" << fmt(y0 + side)
       << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  }
  for (const Vec2& p : points) {
    if (p.x < window.xmin || p.x > window.xmax || p.y < window.ymin || p.y > window.ymax) continue;
    os << "<circle cx=\"" << fmt(x0 + (p.x - window.xmin) * sx) << "\" cy=\""
       << fmt(y0 + side - (p.y - window.ymin) * sy) << "\" r=\"2\" fill=\"" << (p.x >= 0.0 ? "black" : "firebrick")
       << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) { write_file(path, j.dump(2) + "\n"); }

}  // namespace latstat
