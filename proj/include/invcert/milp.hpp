// Self-contained mixed-integer linear programming: a dense bounded-variable
// primal simplex for LP relaxations and best-bound branch and bound over
// binary variables. All objectives are maximized.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace invcert::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Relation { LessEqual, Equal, GreaterEqual };
/// Cutoff: stopped early because an incumbent exceeded MilpOptions::stop_above.
enum class Status { Optimal, Infeasible, Unbounded, NodeLimit, TimeLimit, NumericalFailure, Cutoff };

std::string_view to_string(Status status);

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0;
  double upper = kInf;
};

struct Term {
  int var;
  double coeff;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0;
};

class Model {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  int add_continuous(std::string name, double lower, double upper) {
    return add_variable(std::move(name), VarKind::Continuous, lower, upper);
  }
  int add_binary(std::string name) { return add_variable(std::move(name), VarKind::Binary, 0.0, 1.0); }

  int add_constraint(std::vector<Term> terms, Relation relation, double rhs, std::string name = {});

  /// Objective is always maximized.
  void set_objective(std::vector<Term> terms);
  void set_bounds(int var, double lower, double upper);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  const Variable& variable(int var) const { return variables_.at(static_cast<std::size_t>(var)); }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  double objective_value(const Eigen::VectorXd& values) const;
  /// Largest violation of rows (relative to 1 + |rhs|) and variable bounds.
  double max_violation(const Eigen::VectorXd& values) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
};

struct LpSolution {
  Status status = Status::NumericalFailure;
  double objective = 0;
  Eigen::VectorXd values;
  long iterations = 0;
};

/// Solves the LP obtained by relaxing binaries to [0, 1]. With relax=false
/// the model must not contain binaries.
LpSolution lp_solve(const Model& model, bool relax = true);

struct MilpOptions {
  long node_limit = 2'000'000;
  double time_limit_seconds = kInf;
  double abs_gap = 1e-6;
  double integrality_tol = 1e-6;
  /// A depth-first rounding dive runs after every `dive_interval` nodes.
  int dive_interval = 16;
  /// Stop as soon as an incumbent exceeds this value. A finite value also
  /// starts a dive at the root.
  double stop_above = kInf;
};

struct MilpStats {
  long nodes = 0;
  long lp_iterations = 0;
  double wall_seconds = 0;
};

struct MilpSolution {
  Status status = Status::NumericalFailure;
  /// Incumbent objective; -inf when no integral solution was found.
  double objective = -kInf;
  /// Proven upper bound on the optimum.
  double best_bound = kInf;
  bool has_incumbent = false;
  Eigen::VectorXd values;
  MilpStats stats;
};

MilpSolution milp_solve(const Model& model, const MilpOptions& options = {});

/// CPLEX-style LP text (Maximize / Subject To / Bounds / Binaries / End),
/// numbers at 17 significant digits.
std::string to_lp_format(const Model& model);

}  // namespace invcert::milp
