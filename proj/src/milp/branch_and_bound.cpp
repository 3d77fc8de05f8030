#include "invcert/milp.hpp"

#include "simplex.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <queue>

namespace invcert::milp {
namespace {

constexpr double kIncumbentViolationTol = 1e-6;

struct Node {
  double bound;
  long id;
  int branch;  // position in the binary list
  std::vector<signed char> fix;  // -1 free, else fixed value
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id < b.id;  // newest first among ties
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const Model& model, const MilpOptions& options)
      : model_(model), options_(options), engine_(model), start_(std::chrono::steady_clock::now()) {
    for (int j = 0; j < model.num_variables(); ++j)
      if (model.variable(j).kind == VarKind::Binary) binaries_.push_back(j);
  }

  MilpSolution run() {
    MilpSolution result;
    const std::vector<signed char> root_fix(binaries_.size(), -1);
    const auto root = solve_lp(root_fix);
    if (root == detail::LpStatus::Infeasible) return finish(Status::Infeasible);
    if (root == detail::LpStatus::Unbounded) return finish(Status::Unbounded);
    if (root == detail::LpStatus::NumericalFailure) return finish(Status::NumericalFailure);

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    {
      const int branch = branch_or_offer(values_);
      if (branch >= 0) open.push({objective_, next_id_++, branch, root_fix});
      if (branch >= 0 && std::isfinite(options_.stop_above)) dive(root_fix, values_);
    }

    while (!open.empty()) {
      if (has_incumbent_ && incumbent_ > options_.stop_above) return finish(Status::Cutoff, open.top().bound);
      if (open.top().bound <= incumbent_ + options_.abs_gap) break;
      if (stats_.nodes >= options_.node_limit) return finish(Status::NodeLimit, open.top().bound);
      if (elapsed() >= options_.time_limit_seconds) return finish(Status::TimeLimit, open.top().bound);

      Node node = open.top();
      open.pop();
      if (node.bound <= incumbent_ + options_.abs_gap) continue;
      ++stats_.nodes;

      std::vector<signed char> dive_fix;
      Eigen::VectorXd dive_values;
      for (signed char value : {static_cast<signed char>(0), static_cast<signed char>(1)}) {
        auto fix = node.fix;
        fix[static_cast<std::size_t>(node.branch)] = value;
        const auto status = solve_lp(fix);
        if (status == detail::LpStatus::NumericalFailure) {
          numerical_trouble_ = true;
          continue;
        }
        if (status != detail::LpStatus::Optimal) continue;
        if (objective_ <= incumbent_ + options_.abs_gap) continue;
        const int branch = branch_or_offer(values_);
        if (branch < 0) continue;
        dive_fix = fix;
        dive_values = values_;
        open.push({objective_, next_id_++, branch, std::move(fix)});
      }

      if (options_.dive_interval > 0 && stats_.nodes % options_.dive_interval == 0 && !dive_fix.empty())
        dive(std::move(dive_fix), std::move(dive_values));
    }

    if (has_incumbent_ && incumbent_ > options_.stop_above && !open.empty())
      return finish(Status::Cutoff, open.top().bound);
    const double bound = open.empty() ? incumbent_ : std::max(open.top().bound, incumbent_);
    if (!has_incumbent_) return finish(numerical_trouble_ ? Status::NumericalFailure : Status::Infeasible);
    return finish(numerical_trouble_ ? Status::NumericalFailure : Status::Optimal, bound);
  }

 private:
  detail::LpStatus solve_lp(const std::vector<signed char>& fix) {
    engine_.reset_bounds();
    for (std::size_t k = 0; k < binaries_.size(); ++k)
      if (fix[k] >= 0) engine_.set_bounds(binaries_[k], fix[k], fix[k]);
    const auto status = engine_.solve();
    if (status == detail::LpStatus::Optimal) {
      values_ = engine_.structural_values();
      objective_ = model_.objective_value(values_);
    }
    return status;
  }

  int most_fractional(const Eigen::VectorXd& values, double tol) const {
    int best = -1;
    double best_frac = tol;
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      const double v = values(binaries_[k]);
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        best = static_cast<int>(k);
      }
    }
    return best;
  }

  // Binary to branch on, or -1 once the point has been offered as an
  // incumbent. A point that is integral only within tolerance is still
  // branched when its snapped pattern is infeasible or clearly worse, since
  // tolerance times a large big-M constant can hide a wrong pattern.
  int branch_or_offer(const Eigen::VectorXd& values) {
    const int branch = most_fractional(values, options_.integrality_tol);
    if (branch >= 0) return branch;
    const double relaxed_objective = model_.objective_value(values);
    const auto snapped = offer_incumbent(values);
    if (snapped && *snapped >= relaxed_objective - options_.abs_gap) return -1;
    return most_fractional(values, 0.0);
  }

  // Binaries within tolerance of {0, 1} are snapped and the LP re-solved, so
  // big-M rows hold exactly rather than up to tolerance times M. Returns the
  // objective of the snapped point, or nothing when its LP is not solved.
  std::optional<double> offer_incumbent(const Eigen::VectorXd& relaxed) {
    Eigen::VectorXd values = relaxed;
    std::vector<signed char> snapped(binaries_.size());
    bool exact = true;
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      const double v = relaxed(binaries_[k]);
      snapped[k] = v >= 0.5 ? 1 : 0;
      if (v != static_cast<double>(snapped[k])) exact = false;
    }
    if (!exact) {
      const double saved_objective = objective_;
      const Eigen::VectorXd saved_values = values_;
      const auto status = solve_lp(snapped);
      if (status == detail::LpStatus::Optimal) values = values_;
      objective_ = saved_objective;
      values_ = saved_values;
      if (status != detail::LpStatus::Optimal) return std::nullopt;
    }
    const double value = model_.objective_value(values);
    if (has_incumbent_ && value <= incumbent_) return value;
    if (model_.max_violation(values) > kIncumbentViolationTol) {
      numerical_trouble_ = true;
      return value;
    }
    incumbent_ = value;
    incumbent_values_ = values;
    has_incumbent_ = true;
    return value;
  }

  // plain depth-first rounding dive, no backtracking beyond one flip per level
  void dive(std::vector<signed char> fix, Eigen::VectorXd values) {
    for (std::size_t depth = 0; depth < binaries_.size(); ++depth) {
      const int branch = branch_or_offer(values);
      if (branch < 0) return;
      const auto k = static_cast<std::size_t>(branch);
      const signed char nearest = values(binaries_[k]) >= 0.5 ? 1 : 0;
      fix[k] = nearest;
      auto status = solve_lp(fix);
      if (status != detail::LpStatus::Optimal) {
        fix[k] = static_cast<signed char>(1 - nearest);
        status = solve_lp(fix);
        if (status != detail::LpStatus::Optimal) return;
      }
      if (objective_ <= incumbent_ + options_.abs_gap) return;
      values = values_;
    }
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  MilpSolution finish(Status status, double bound = kInf) {
    MilpSolution solution;
    solution.status = status;
    solution.has_incumbent = has_incumbent_;
    if (has_incumbent_) {
      solution.objective = incumbent_;
      solution.values = incumbent_values_;
    }
    solution.best_bound = status == Status::Infeasible ? -kInf : std::max(bound, incumbent_);
    if (status == Status::Optimal) solution.best_bound = std::max(incumbent_, bound);
    stats_.lp_iterations = engine_.iterations();
    stats_.wall_seconds = elapsed();
    solution.stats = stats_;
    return solution;
  }

  const Model& model_;
  MilpOptions options_;
  detail::SimplexEngine engine_;
  std::chrono::steady_clock::time_point start_;
  std::vector<int> binaries_;

  Eigen::VectorXd values_;
  double objective_ = 0;

  bool has_incumbent_ = false;
  double incumbent_ = -kInf;
  Eigen::VectorXd incumbent_values_;
  bool numerical_trouble_ = false;
  long next_id_ = 0;
  MilpStats stats_;
};

}  // namespace

MilpSolution milp_solve(const Model& model, const MilpOptions& options) {
  return BranchAndBound(model, options).run();
}

}  // namespace invcert::milp
