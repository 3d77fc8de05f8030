#include "invcert/milp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace invcert::milp {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::NodeLimit: return "NodeLimit";
    case Status::TimeLimit: return "TimeLimit";
    case Status::NumericalFailure: return "NumericalFailure";
    case Status::Cutoff: return "Cutoff";
  }
  return "Unknown";
}

int Model::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (kind == VarKind::Binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  variables_.push_back({std::move(name), kind, lower, upper});
  return static_cast<int>(variables_.size()) - 1;
}

int Model::add_constraint(std::vector<Term> terms, Relation relation, double rhs, std::string name) {
  if (name.empty()) name = "c" + std::to_string(constraints_.size());
  constraints_.push_back({std::move(name), std::move(terms), relation, rhs});
  return static_cast<int>(constraints_.size()) - 1;
}

void Model::set_objective(std::vector<Term> terms) { objective_ = std::move(terms); }

void Model::set_bounds(int var, double lower, double upper) {
  auto& v = variables_.at(static_cast<std::size_t>(var));
  v.lower = lower;
  v.upper = upper;
}

int Model::num_binaries() const {
  return static_cast<int>(
      std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

void Model::validate() const {
  const int n = num_variables();
  for (const auto& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper)) throw std::invalid_argument("variable " + v.name + ": NaN bound");
    if (v.kind == VarKind::Binary && (v.lower < 0 || v.upper > 1))
      throw std::invalid_argument("binary " + v.name + " must have bounds within [0, 1]");
  }
  auto check_terms = [n](const std::vector<Term>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n) throw std::invalid_argument(where + ": undeclared variable " + std::to_string(t.var));
      if (!std::isfinite(t.coeff)) throw std::invalid_argument(where + ": non-finite coefficient");
    }
  };
  for (const auto& c : constraints_) {
    check_terms(c.terms, "constraint " + c.name);
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("constraint " + c.name + ": non-finite rhs");
  }
  check_terms(objective_, "objective");
}

double Model::objective_value(const Eigen::VectorXd& values) const {
  double value = 0;
  for (const auto& t : objective_) value += t.coeff * values(t.var);
  return value;
}

double Model::max_violation(const Eigen::VectorXd& values) const {
  double worst = 0;
  for (int j = 0; j < num_variables(); ++j) {
    const auto& v = variables_[static_cast<std::size_t>(j)];
    const double scale = 1.0 + std::abs(values(j));
    worst = std::max(worst, (v.lower - values(j)) / scale);
    worst = std::max(worst, (values(j) - v.upper) / scale);
  }
  for (const auto& c : constraints_) {
    double activity = 0;
    for (const auto& t : c.terms) activity += t.coeff * values(t.var);
    const double scale = 1.0 + std::abs(c.rhs);
    double violation = 0;
    switch (c.relation) {
      case Relation::LessEqual: violation = activity - c.rhs; break;
      case Relation::GreaterEqual: violation = c.rhs - activity; break;
      case Relation::Equal: violation = std::abs(activity - c.rhs); break;
    }
    worst = std::max(worst, violation / scale);
  }
  return worst;
}

}  // namespace invcert::milp
