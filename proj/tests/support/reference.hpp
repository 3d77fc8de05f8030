// Plain-loop evaluators kept apart from the library code they check.
#pragma once

#include "invcert/network.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace reference {

inline std::vector<double> forward(const invcert::ReluMlp& net, const std::vector<double>& x) {
  std::vector<double> h = x;
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& w = layers[k].weight;
    std::vector<double> next(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double s = layers[k].bias(i);
      for (Eigen::Index j = 0; j < w.cols(); ++j) s += w(i, j) * h[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = k + 1 < layers.size() ? std::max(0.0, s) : s;
    }
    h = std::move(next);
  }
  return h;
}

inline std::vector<double> forward(const invcert::ResidualNet& net, std::vector<double> x) {
  for (const auto& block : net.blocks()) {
    const auto g = forward(block, x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += g[i];
  }
  return x;
}

/// One forward-Euler step of the Brusselator.
inline std::array<double, 2> brusselator(double a, double b, double tau, double x, double y) {
  return {x + tau * (a + x * x * y - (b + 1) * x), y + tau * (b * x - x * x * y)};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace reference
