// Dense bounded-variable primal simplex used by lp_solve and the branch and
// bound driver. Internal to the library.
#pragma once

#include "invcert/milp.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <vector>

namespace invcert::milp::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

/// Computational form: rows A x - s = 0 with bounds on both the structural
/// columns x and the row activities s. Singleton rows are folded into
/// variable bounds and every row is scaled to unit max-norm. The engine keeps
/// its basis between solves, so re-solving after bound changes starts warm.
class SimplexEngine {
 public:
  explicit SimplexEngine(const Model& model);

  int num_structural() const { return n_; }
  int num_rows() const { return m_; }

  /// Bounds of structural variable j, intersected with the presolved bounds.
  void set_bounds(int j, double lower, double upper);
  void reset_bounds();

  LpStatus solve();

  double objective() const;
  Eigen::VectorXd structural_values() const { return x_.head(n_); }
  long iterations() const { return iterations_; }

 private:
  enum class Place : unsigned char { Basic, Lower, Upper, Free };

  void slack_basis();
  bool reinvert();
  void compute_basic_values();
  void place_nonbasic(int j);
  double primal_tol(double bound) const;
  /// Reduced costs of all columns for the current basis.
  Eigen::VectorXd reduced_costs() const;
  bool dual_feasible(const Eigen::VectorXd& reduced) const;
  /// Primal simplex with a composite phase one.
  LpStatus run(long iteration_cap);
  /// Dual simplex from a dual feasible basis; NumericalFailure when it
  /// cannot finish and the primal method should take over.
  LpStatus run_dual(long iteration_cap);
  void pivot(int row, int entering, const Eigen::VectorXd& alpha);
  /// Checks a dual ray from row r of B^-1 without refactorizing: the row must
  /// invert the basis and the bound violation must survive recomputation.
  bool infeasibility_proved(int r, const Eigen::RowVectorXd& row_alpha, bool to_lower) const;

  int n_ = 0;
  int m_ = 0;
  bool presolve_infeasible_ = false;

  Eigen::SparseMatrix<double> a_;  // m x n scaled rows
  Eigen::VectorXd cost_;       // length n + m, logical costs zero
  Eigen::VectorXd base_lb_, base_ub_;  // structural bounds after presolve
  Eigen::VectorXd lb_, ub_, x_;        // length n + m

  std::vector<int> head_;      // basic variable of each row
  std::vector<Place> place_;   // per variable
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> binv_;  // rows are read far more than columns
  int pivots_since_reinvert_ = 0;
  long iterations_ = 0;
  bool basis_valid_ = false;
};

}  // namespace invcert::milp::detail
