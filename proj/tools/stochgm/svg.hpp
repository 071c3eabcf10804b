#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stochgm::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::optional<std::pair<double, double>> y_range;
  std::vector<Series> series;
};

/// Grid of line-chart panels as a standalone SVG document.
std::string render_svg(const std::vector<Panel>& panels, int columns, const std::string& title);

void write_svg(const std::filesystem::path& path, const std::vector<Panel>& panels, int columns,
               const std::string& title);

}  // namespace stochgm::cli
