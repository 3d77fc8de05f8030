// Brute-force verifiers. Slow on purpose and independent of the encoder
// and the branch-and-bound solver: they only share the network and
// interval-bound code.
#pragma once

#include "invcert/bounds.hpp"
#include "invcert/milp.hpp"
#include "invcert/network.hpp"
#include "invcert/problem.hpp"

#include <functional>
#include <stdexcept>

namespace invcert::oracle {

/// Dense LP: maximize cost.x subject to rows `relation` rhs and box bounds.
struct DenseLp {
  Eigen::MatrixXd a;
  Eigen::VectorXd rhs;
  std::vector<milp::Relation> relation;
  Eigen::VectorXd cost;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct DenseLpResult {
  milp::Status status = milp::Status::NumericalFailure;
  double objective = 0;
  Eigen::VectorXd x;
};

/// Two-phase textbook tableau simplex with Bland's rule.
DenseLpResult tableau_lp_max(const DenseLp& lp);

/// The LP backend used by the oracles: the tableau above, or the library's
/// lp_solve when built with INVCERT_ORACLE_USE_LP_SOLVE.
DenseLpResult solve_dense_lp(const DenseLp& lp);

struct CollisionResult {
  double gap = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// Largest ||x - y||_inf over collisions f(x) = f(y) found on a grid over
/// the L-inf box. One input: the grid is treated as the nodes of the
/// piecewise-linear interpolant and collisions are located exactly on it via
/// prefix/suffix range envelopes (O(N log N)). Two inputs: all node pairs with
/// ||f(x) - f(y)||_inf <= match_tol.
CollisionResult grid_collision_search(const ReluMlp& net, const InputBox& box, int resolution,
                                      double match_tol = 1e-9);

/// One-input analogue for the center's preimage: largest |x - x_c| with
/// f(x) = f(x_c) on the interpolant.
CollisionResult grid_pseudo_search(const ReluMlp& net, const InputBox& box, int resolution);

/// One-input paired search: largest |g(x1) - g(x2)| over f(x1) = f(x2) on
/// the interpolant of f (g evaluated exactly at the located points).
CollisionResult grid_mappability_search(const ReluMlp& f, const ReluMlp& g, const InputBox& box, int resolution);

class EnumerationCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct EnumerationResult {
  double optimum = 0;
  long regions = 0;  // nonempty activation regions visited
  long lps = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// Exact optimum of the invertibility or pseudo-invertibility program by
/// enumerating every activation pattern of the units the interval bounds
/// leave undetermined and solving one LP per pattern (pair).
EnumerationResult pattern_enumeration_optimum(const ReluMlp& net, const InputBox& box, ProblemKind kind,
                                              int max_units = 14);

/// Exact optimum of the mappability program max ||g(x1) - g(x2)|| subject to
/// f(x1) = f(x2).
EnumerationResult pattern_enumeration_mappability(const ReluMlp& f, const ReluMlp& g, const InputBox& box,
                                                  int max_units = 14);

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian.
Eigen::MatrixXd fd_jacobian(const VectorMap& map, const Eigen::VectorXd& x, double h);

/// Dense outward scan of a scalar network: largest r <= r_max such that f is
/// strictly monotone on [x_c - r, x_c + r]. Accurate to `step`.
double scan_invertible_radius_1d(const ReluMlp& net, double center, double r_max, double step = 1e-5);

/// Dense outward scan: distance to the nearest x != x_c with f(x) = f(x_c),
/// capped at r_max.
double scan_pseudo_radius_1d(const ReluMlp& net, double center, double r_max, double step = 1e-5);

}  // namespace invcert::oracle
