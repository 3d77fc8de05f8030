#include "invcert/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace invcert::dynamics {

J0Grid j0_grid(const PlanarMap& map, const Rect& region, int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("j0 grid needs at least two nodes per axis");
  J0Grid grid;
  grid.region = region;
  grid.nx = nx;
  grid.ny = ny;
  grid.det.resize(nx, ny);
  const double dx = (region.x_max - region.x_min) / (nx - 1);
  const double dy = (region.y_max - region.y_min) / (ny - 1);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      grid.det(i, j) = map.jacobian({region.x_min + i * dx, region.y_min + j * dy}).determinant();

  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) {
      const std::array<double, 4> c{grid.det(i, j), grid.det(i + 1, j), grid.det(i, j + 1), grid.det(i + 1, j + 1)};
      bool flag = false;
      for (std::size_t p = 0; p < 4 && !flag; ++p)
        for (std::size_t q = p + 1; q < 4 && !flag; ++q) flag = c[p] * c[q] <= 0;
      if (flag) grid.flagged.emplace_back(i, j);
    }
  return grid;
}

std::vector<Sample> generate_dataset(const Map& map, const Rect& region, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("dataset needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(region.x_min, region.x_max);
  std::uniform_real_distribution<double> uy(region.y_min, region.y_max);
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x(2);
    x(0) = ux(rng);
    x(1) = uy(rng);
    samples.push_back({x, map(x)});
  }
  return samples;
}

std::string dataset_to_csv(const std::vector<Sample>& samples) {
  std::ostringstream out;
  out.precision(17);
  out << "x1,y1,x2,y2\n";
  for (const auto& s : samples) {
    if (s.input.size() != 2 || s.output.size() != 2) throw DimensionError("CSV dataset rows must be planar");
    out << s.input(0) << ',' << s.input(1) << ',' << s.output(0) << ',' << s.output(1) << '\n';
  }
  return out.str();
}

LipschitzEstimate bilipschitz_estimate(const Map& map, const Rect& region, int samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("Lipschitz estimate needs at least two samples");
  const auto data = generate_dataset(map, region, samples, seed);
  LipschitzEstimate est{0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      const double din = (data[i].input - data[j].input).norm();
      if (din == 0.0) continue;
      const double ratio = (data[i].output - data[j].output).norm() / din;
      est.upper = std::max(est.upper, ratio);
      est.lower = std::min(est.lower, ratio);
    }
  if (!std::isfinite(est.lower)) est.lower = 0;
  return est;
}

}  // namespace invcert::dynamics
