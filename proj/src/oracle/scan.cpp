#include "invcert/oracle.hpp"

#include <cmath>

namespace invcert::oracle {
namespace {

double eval(const ReluMlp& net, double x) { return forward(net, Eigen::VectorXd::Constant(1, x))(0); }

void check_scan(const ReluMlp& net, double r_max, double step) {
  if (net.input_dim() != 1 || net.output_dim() != 1) throw DimensionError("1D scan needs a scalar network");
  if (!(r_max > 0) || !(step > 0)) throw std::invalid_argument("scan needs positive r_max and step");
}

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

double scan_invertible_radius_1d(const ReluMlp& net, double center, double r_max, double step) {
  check_scan(net, r_max, step);
  const auto steps = static_cast<long>(std::ceil(r_max / step));
  double left = eval(net, center), right = left;
  int direction = 0;
  for (long k = 1; k <= steps; ++k) {
    const double r = std::min(r_max, static_cast<double>(k) * step);
    const double next_left = eval(net, center - r);
    const double next_right = eval(net, center + r);
    const int s_left = sign(left - next_left);  // slope sign on the left segment
    const int s_right = sign(next_right - right);
    if (s_left == 0 || s_right == 0) return static_cast<double>(k - 1) * step;
    if (direction == 0) direction = s_left;
    if (s_left != direction || s_right != direction) return static_cast<double>(k - 1) * step;
    left = next_left;
    right = next_right;
  }
  return r_max;
}

double scan_pseudo_radius_1d(const ReluMlp& net, double center, double r_max, double step) {
  check_scan(net, r_max, step);
  const double level = eval(net, center);
  const auto steps = static_cast<long>(std::ceil(r_max / step));
  double prev_left = level, prev_right = level;
  for (long k = 1; k <= steps; ++k) {
    const double r = std::min(r_max, static_cast<double>(k) * step);
    const double r_prev = static_cast<double>(k - 1) * step;
    const double left = eval(net, center - r);
    const double right = eval(net, center + r);
    if (k == 1) {
      // segments touching the center only collide when flat
      if (left == level || right == level) return 0.0;
    } else {
      for (auto [a, b] : {std::pair{prev_left, left}, std::pair{prev_right, right}}) {
        if (level < std::min(a, b) || level > std::max(a, b)) continue;
        const double t = a == b ? 0.0 : (level - a) / (b - a);
        return std::min(r_max, r_prev + t * (r - r_prev));
      }
    }
    prev_left = left;
    prev_right = right;
  }
  return r_max;
}

}  // namespace invcert::oracle
