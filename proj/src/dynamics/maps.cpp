#include "invcert/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace invcert::dynamics {

Eigen::Vector2d brusselator_step(const BrusselatorEuler& m, const Eigen::Vector2d& p) {
  const double x = p(0), y = p(1);
  const double x2y = x * x * y;
  return {x + m.tau * (m.a + x2y - (m.b + 1) * x), y + m.tau * (m.b * x - x2y)};
}

Eigen::Matrix2d brusselator_jacobian(const BrusselatorEuler& m, const Eigen::Vector2d& p) {
  const double x = p(0), y = p(1);
  Eigen::Matrix2d j;
  j << 1 + m.tau * (2 * x * y - (m.b + 1)), m.tau * x * x,  //
      m.tau * (m.b - 2 * x * y), 1 - m.tau * x * x;
  return j;
}

std::vector<Eigen::Vector2d> brusselator_preimages(const BrusselatorEuler& m, const Eigen::Vector2d& target) {
  const double t = m.tau;
  if (t == 0.0 || t == 1.0) throw std::domain_error("cubic preimage needs tau outside {0, 1}");
  const double xp = target(0), yp = target(1);
  const auto roots = polynomial_roots(
      {t * (1 - t), t * (t * m.a - xp - yp), t * m.b + t - 1, xp - t * m.a});
  std::vector<Eigen::Vector2d> pre;
  for (const auto& z : roots) {
    if (!is_real_root(z)) continue;
    const double x = z.real();
    // adding both step equations: x' + y' = x + y + tau (a - x)
    const double y = xp + yp - x - t * (m.a - x);
    pre.emplace_back(x, y);
  }
  std::sort(pre.begin(), pre.end(), [](const auto& p, const auto& q) { return p(0) < q(0); });
  return pre;
}

double scalar_step(const ScalarQuadraticEuler& m, double x) { return x + m.tau * (x * x + m.b * x + m.c); }

double scalar_discriminant(const ScalarQuadraticEuler& m, double target) {
  const double lin = m.tau * m.b + 1;
  return lin * lin - 4 * m.tau * (m.tau * m.c - target);
}

std::vector<double> scalar_preimages(const ScalarQuadraticEuler& m, double target) {
  if (!(m.tau > 0)) throw std::domain_error("scalar Euler map needs tau > 0");
  const double disc = scalar_discriminant(m, target);
  if (disc < 0) return {};
  const auto roots = quadratic_roots(m.tau, m.tau * m.b + 1, m.tau * m.c - target);
  if (disc == 0) return {roots[0].real()};
  std::vector<double> out{roots[0].real(), roots[1].real()};
  std::sort(out.begin(), out.end());
  return out;
}

PlanarMap brusselator_map(const BrusselatorEuler& m) {
  return {[m](const Eigen::Vector2d& p) { return brusselator_step(m, p); },
          [m](const Eigen::Vector2d& p) { return brusselator_jacobian(m, p); }};
}

PlanarMap linear_map(const Eigen::Matrix2d& a) {
  return {[a](const Eigen::Vector2d& p) -> Eigen::Vector2d { return a * p; },
          [a](const Eigen::Vector2d&) { return a; }};
}

PlanarMap network_map(const ReluMlp& net) {
  if (net.input_dim() != 2 || net.output_dim() != 2) throw DimensionError("planar map needs a 2-in 2-out network");
  return {[net](const Eigen::Vector2d& p) -> Eigen::Vector2d { return forward(net, p); },
          [net](const Eigen::Vector2d& p) -> Eigen::Matrix2d { return jacobian(net, p); }};
}

Eigen::Vector2d vdp_field(const Eigen::Vector2d& x, double mu) {
  return {x(1), mu * (1 - x(0) * x(0)) * x(1) - x(0)};
}

Eigen::Vector2d vdp_flow(const Eigen::Vector2d& x0, double mu, double t, int steps) {
  if (steps < 1) throw std::invalid_argument("vdp_flow needs at least one step");
  const double h = t / steps;
  Eigen::Vector2d x = x0;
  for (int s = 0; s < steps; ++s) {
    const Eigen::Vector2d k1 = vdp_field(x, mu);
    const Eigen::Vector2d k2 = vdp_field(x + 0.5 * h * k1, mu);
    const Eigen::Vector2d k3 = vdp_field(x + 0.5 * h * k2, mu);
    const Eigen::Vector2d k4 = vdp_field(x + h * k3, mu);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace invcert::dynamics
