// Minimal SVG 1.1 scatter and line plots.
#pragma once

#include <string>
#include <vector>

namespace invcert::cli {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotStyle {
  std::string title;
  std::string x_label, y_label;
  bool lines = false;
  int width = 640, height = 480;
};

std::string svg_plot(const std::vector<Series>& series, const PlotStyle& style);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  /// First non-numeric cell per column; empty when the column is numeric.
  std::vector<std::string> errors;
  /// Throws std::invalid_argument when `name` is not a numeric column.
  const std::vector<double>& column(const std::string& name) const;
};

/// Header line then rows; blank lines are skipped. Text columns are kept out
/// of `columns` and only fail when requested.
CsvTable parse_csv(const std::string& text);

}  // namespace invcert::cli
