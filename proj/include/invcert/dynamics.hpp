// Reference dynamical systems with known inverses: forward-Euler
// Brusselator and scalar quadratic maps, their preimages, partial-history
// completion, Jacobian-sign loci, and a Van der Pol integrator for datasets.
#pragma once

#include "invcert/network.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace invcert::dynamics {

// ---- polynomials ----

/// Roots of sum_k coeffs[k] x^(deg-k) (highest degree first) from the
/// companion matrix eigenvalues, each refined by Newton steps.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

/// Both roots of a x^2 + b x + c, a != 0, using q = -(b + sign(b) sqrt(disc)) / 2.
std::array<std::complex<double>, 2> quadratic_roots(double a, double b, double c);

/// |Im z| <= 1e-9 (1 + |Re z|).
bool is_real_root(std::complex<double> z);

// ---- maps ----

struct BrusselatorEuler {
  double a = 1;
  double b = 2;
  double tau = 0.15;
};

Eigen::Vector2d brusselator_step(const BrusselatorEuler& m, const Eigen::Vector2d& p);
Eigen::Matrix2d brusselator_jacobian(const BrusselatorEuler& m, const Eigen::Vector2d& p);
/// Real preimages of `target`; throws std::domain_error for tau in {0, 1}.
std::vector<Eigen::Vector2d> brusselator_preimages(const BrusselatorEuler& m, const Eigen::Vector2d& target);

/// x' = x + tau (x^2 + b x + c).
struct ScalarQuadraticEuler {
  double b = 0;
  double c = 0;
  double tau = 0.1;
};

double scalar_step(const ScalarQuadraticEuler& m, double x);
/// tau X^2 + (tau b + 1) X + (tau c - x') = 0 has discriminant
/// (tau b + 1)^2 - 4 tau (tau c - x').
double scalar_discriminant(const ScalarQuadraticEuler& m, double target);
/// Zero, one (double root) or two real preimages, ascending.
std::vector<double> scalar_preimages(const ScalarQuadraticEuler& m, double target);

struct PlanarMap {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> eval;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> jacobian;
};

PlanarMap brusselator_map(const BrusselatorEuler& m);
PlanarMap linear_map(const Eigen::Matrix2d& a);
/// A 2-in 2-out ReLU network; the Jacobian is that of the active pattern,
/// with zero pre-activations counted inactive.
PlanarMap network_map(const ReluMlp& net);

/// Van der Pol field x1' = x2, x2' = mu (1 - x1^2) x2 - x1.
Eigen::Vector2d vdp_field(const Eigen::Vector2d& x, double mu);
/// Classical RK4 over duration t with `steps` equal steps.
Eigen::Vector2d vdp_flow(const Eigen::Vector2d& x0, double mu, double t, int steps = 200);

// ---- history completion ----

/// Order of the five quantities in a completion.
enum class Quantity { Xn, Yn, Xn1, Yn1, Tau };

std::string_view to_string(Quantity q);

/// The three quantities given in each case, in the order the values are
/// passed. Cases 1..10:
///  1 (xn, yn, tau)   2 (xn1, yn1, tau)  3 (xn, xn1, tau)  4 (yn, yn1, tau)
///  5 (xn, yn1, tau)  6 (yn, xn1, tau)   7 (xn, yn, xn1)   8 (xn, yn, yn1)
///  9 (yn, xn1, yn1)  10 (xn, xn1, yn1)
std::array<Quantity, 3> history_given(int case_id);

struct HistoryQuery {
  int case_id = 1;
  Eigen::Vector3d given = Eigen::Vector3d::Zero();
  double a = 1;
  double b = 2;
};

struct Completion {
  /// xn, yn, xn1, yn1, tau.
  std::array<std::complex<double>, 5> values{};
  bool real = true;
  /// Largest residual of the two step equations (for real completions).
  double residual = 0;

  double value(Quantity q) const { return values[static_cast<std::size_t>(q)].real(); }
  std::complex<double> complex_value(Quantity q) const { return values[static_cast<std::size_t>(q)]; }
};

/// Raised for vanishing denominators or leading coefficients.
class DegenerateCase : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Every completion of the two missing quantities; non-real roots are
/// returned with real = false and their complex values.
std::vector<Completion> history_complete(const HistoryQuery& query);

// ---- analysis ----

struct Rect {
  double x_min = 0, x_max = 1;
  double y_min = 0, y_max = 1;
};

struct J0Grid {
  Rect region;
  int nx = 0, ny = 0;
  /// det(i, j) at x_i = x_min + i dx, y_j = y_min + j dy.
  Eigen::MatrixXd det;
  /// Lower-left node indices of cells where two corners have det product <= 0.
  std::vector<std::pair<int, int>> flagged;
};

/// `nx`, `ny` are node counts per axis (>= 2).
J0Grid j0_grid(const PlanarMap& map, const Rect& region, int nx, int ny);

struct Sample {
  Eigen::VectorXd input;
  Eigen::VectorXd output;
};

using Map = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// `count` inputs uniform on the rectangle, paired with their images.
std::vector<Sample> generate_dataset(const Map& map, const Rect& region, int count, std::uint64_t seed);
/// Header x1,y1,x2,y2 for planar data.
std::string dataset_to_csv(const std::vector<Sample>& samples);

struct LipschitzEstimate {
  double upper = 0;  // largest observed |F(a) - F(b)| / |a - b|
  double lower = 0;  // smallest observed ratio
};

/// Ratios over all pairs of `samples` uniform points (Euclidean norms).
/// A sample estimate, not a bound.
LipschitzEstimate bilipschitz_estimate(const Map& map, const Rect& region, int samples, std::uint64_t seed);

}  // namespace invcert::dynamics
