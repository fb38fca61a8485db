#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace kinlyap::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

// Line plot with axes, ticks and a legend, written as a standalone SVG.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<Series>& series);

}  // namespace kinlyap::cli
