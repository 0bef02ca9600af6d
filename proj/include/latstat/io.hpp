#pragma once

// Flat-file outputs: CSV with 17 significant digits, JSON reports, and
// 800x600 SVG renderings of histograms and point sets.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "latstat/geometry.hpp"
#include "latstat/sequences.hpp"
#include "latstat/statistics.hpp"

namespace latstat {

// Raised for unwritable output paths; the CLI maps it to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "%.17g"
std::string format_real(double v);

// Header n,xi,gap,scaled_gap; row n is the n-th smallest value and the gap
// to its successor on the circle.
std::string gaps_csv(const GapSample& g);

struct CountRow {
  std::int64_t replica = 0;
  std::int64_t region_id = 0;
  std::int64_t count = 0;
};
// Header replica,region_id,count.
std::string counts_csv(const std::vector<CountRow>& rows);

// Header bin_lo,bin_hi,count.
std::string histogram_csv(const Histogram& h);

std::string histogram_svg(const Histogram& h, const std::string& title);
std::string histograms_svg(const Histogram& a, const Histogram& b, const std::string& title_a,
                           const std::string& title_b);
std::string scatter_svg(const std::vector<Vec2>& points, const Rect& window, const std::string& title);

// Writes atomically enough for a single writer; throws IoError.
void write_file(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace latstat
