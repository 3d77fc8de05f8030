#include "invcert/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace invcert::dynamics {
namespace {

std::complex<double> horner(const std::vector<double>& c, std::complex<double> z, std::complex<double>& deriv) {
  std::complex<double> p = 0;
  deriv = 0;
  for (double coeff : c) {
    deriv = deriv * z + p;
    p = p * z + coeff;
  }
  return p;
}

}  // namespace

bool is_real_root(std::complex<double> z) { return std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z.real())); }

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
  std::size_t lead = 0;
  while (lead < coeffs.size() && coeffs[lead] == 0.0) ++lead;
  if (lead == coeffs.size()) throw std::invalid_argument("zero polynomial has no isolated roots");
  const std::vector<double> c(coeffs.begin() + static_cast<std::ptrdiff_t>(lead), coeffs.end());
  const auto degree = static_cast<Eigen::Index>(c.size()) - 1;
  if (degree == 0) return {};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (Eigen::Index j = 0; j < degree; ++j) companion(0, j) = -c[static_cast<std::size_t>(j + 1)] / c[0];
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const Eigen::VectorXcd eig = solver.eigenvalues();

  std::vector<std::complex<double>> roots;
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    std::complex<double> z = eig(k);
    if (is_real_root(z)) z = z.real();
    // Newton polish; keep the step only if it reduces the residual
    for (int it = 0; it < 3; ++it) {
      std::complex<double> d;
      const auto p = horner(c, z, d);
      if (d == 0.0) break;
      const auto next = z - p / d;
      std::complex<double> d2;
      if (std::abs(horner(c, next, d2)) >= std::abs(p)) break;
      z = next;
    }
    roots.push_back(z);
  }
  return roots;
}

std::array<std::complex<double>, 2> quadratic_roots(double a, double b, double c) {
  if (a == 0.0) throw std::invalid_argument("quadratic_roots needs a nonzero leading coefficient");
  const double disc = b * b - 4 * a * c;
  if (disc < 0) {
    const double re = -b / (2 * a);
    const double im = std::sqrt(-disc) / (2 * std::abs(a));
    return {std::complex<double>(re, im), std::complex<double>(re, -im)};
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return {0.0, 0.0};
  return {q / a, c / q};
}

}  // namespace invcert::dynamics
