#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace invcert::cli {
namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string svg_plot(const std::vector<Series>& series, const PlotStyle& style) {
  Range rx, ry;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series '" + s.label + "' has unequal x and y lengths");
    for (double v : s.x) rx.add(v);
    for (double v : s.y) ry.add(v);
  }
  rx.pad();
  ry.pad();
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = style.width - left - right, ph = style.height - top - bottom;
  auto px = [&](double v) { return left + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return top + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

  std::ostringstream out;
  out.precision(6);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << style.width << "\" height=\""
      << style.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = rx.lo + (rx.hi - rx.lo) * k / 4, vy = ry.lo + (ry.hi - ry.lo) * k / 4;
    out << "<text x=\"" << px(vx) << "\" y=\"" << top + ph + 16 << "\" font-size=\"11\" text-anchor=\"middle\">" << vx
        << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << py(vy) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << vy
        << "</text>\n";
  }
  if (!style.title.empty())
    out << "<text x=\"" << style.width / 2.0 << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">"
        << escape(style.title) << "</text>\n";
  if (!style.x_label.empty())
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << style.height - 12 << "\" font-size=\"12\" text-anchor=\"middle\">"
        << escape(style.x_label) << "</text>\n";
  if (!style.y_label.empty())
    out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << top + ph / 2 << ")\">" << escape(style.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    const auto& ser = series[s];
    if (style.lines) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < ser.x.size(); ++i)
        if (std::isfinite(ser.x[i]) && std::isfinite(ser.y[i])) out << px(ser.x[i]) << ',' << py(ser.y[i]) << ' ';
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < ser.x.size(); ++i)
        if (std::isfinite(ser.x[i]) && std::isfinite(ser.y[i]))
          out << "<circle cx=\"" << px(ser.x[i]) << "\" cy=\"" << py(ser.y[i]) << "\" r=\"2\" fill=\"" << color
              << "\"/>\n";
    }
    if (!ser.label.empty())
      out << "<text x=\"" << left + pw - 6 << "\" y=\"" << top + 16 + 14 * static_cast<double>(s)
          << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(ser.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("CSV has no column '" + name + "'");
  const auto k = static_cast<std::size_t>(it - header.begin());
  if (!errors[k].empty()) throw std::invalid_argument(errors[k]);
  return columns[k];
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (table.header.empty()) {
      table.header = cells;
      table.columns.resize(cells.size());
      table.errors.resize(cells.size());
      continue;
    }
    if (cells.size() != table.header.size())
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                  " cells, header has " + std::to_string(table.header.size()));
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (!table.errors[k].empty()) continue;
      try {
        table.columns[k].push_back(std::stod(cells[k]));
      } catch (const std::exception&) {
        table.errors[k] = "CSV line " + std::to_string(line_no) + ": '" + cells[k] + "' is not a number";
      }
    }
  }
  if (table.header.empty()) throw std::invalid_argument("CSV is empty");
  return table;
}

}  // namespace invcert::cli
