#include "invcert/oracle.hpp"

#include <cmath>

namespace invcert::oracle {
namespace {

constexpr double kEps = 1e-9;

class Tableau {
 public:
  Tableau(int rows, int cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  double& at(int row, int col) { return t_(row + 1, col); }
  double& rhs(int row) { return t_(row + 1, t_.cols() - 1); }
  double& obj(int col) { return t_(0, col); }
  double objective_value() const { return t_(0, t_.cols() - 1); }
  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int row, int col) {
    const int r = row + 1;
    t_.row(r) /= t_(r, col);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i == r || t_(i, col) == 0.0) continue;
      t_.row(i) -= t_(i, col) * t_.row(r);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  /// Bland's rule on columns allowed by `allowed`. Returns false on unbounded.
  bool optimize(const std::vector<bool>& allowed, long& budget, bool& unbounded) {
    unbounded = false;
    while (budget-- > 0) {
      int entering = -1;
      for (int j = 0; j < cols(); ++j)
        if (allowed[static_cast<std::size_t>(j)] && obj(j) < -kEps) {
          entering = j;
          break;
        }
      if (entering < 0) return true;
      int leaving = -1;
      double best = 0;
      for (int i = 0; i < rows(); ++i) {
        const double a = at(i, entering);
        if (a <= kEps) continue;
        const double ratio = rhs(i) / a;
        if (leaving < 0 || ratio < best - kEps ||
            (std::abs(ratio - best) <= kEps && basis_[static_cast<std::size_t>(i)] <
                                                   basis_[static_cast<std::size_t>(leaving)])) {
          leaving = i;
          best = ratio;
        }
      }
      if (leaving < 0) {
        unbounded = true;
        return true;
      }
      pivot(leaving, entering);
    }
    return false;
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

DenseLpResult tableau_lp_max(const DenseLp& lp) {
  const auto n = static_cast<int>(lp.cost.size());
  const auto m = static_cast<int>(lp.rhs.size());

  // x_j = lower + z, or upper - z, or z+ - z-
  enum class Shift { FromLower, FromUpper, Split };
  std::vector<Shift> shift(static_cast<std::size_t>(n));
  std::vector<int> first(static_cast<std::size_t>(n));
  int z_cols = 0;
  for (int j = 0; j < n; ++j) {
    first[static_cast<std::size_t>(j)] = z_cols;
    if (std::isfinite(lp.lower(j))) {
      shift[static_cast<std::size_t>(j)] = Shift::FromLower;
      z_cols += 1;
    } else if (std::isfinite(lp.upper(j))) {
      shift[static_cast<std::size_t>(j)] = Shift::FromUpper;
      z_cols += 1;
    } else {
      shift[static_cast<std::size_t>(j)] = Shift::Split;
      z_cols += 2;
    }
  }

  struct Row {
    Eigen::VectorXd coeff;
    milp::Relation relation;
    double rhs;
  };
  std::vector<Row> rows;
  for (int i = 0; i < m; ++i) {
    Row row{Eigen::VectorXd::Zero(z_cols), lp.relation[static_cast<std::size_t>(i)], lp.rhs(i)};
    for (int j = 0; j < n; ++j) {
      const double a = lp.a(i, j);
      const int z = first[static_cast<std::size_t>(j)];
      switch (shift[static_cast<std::size_t>(j)]) {
        case Shift::FromLower: row.coeff(z) += a; row.rhs -= a * lp.lower(j); break;
        case Shift::FromUpper: row.coeff(z) -= a; row.rhs -= a * lp.upper(j); break;
        case Shift::Split: row.coeff(z) += a; row.coeff(z + 1) -= a; break;
      }
    }
    rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    if (shift[static_cast<std::size_t>(j)] == Shift::FromLower && std::isfinite(lp.upper(j))) {
      Row row{Eigen::VectorXd::Zero(z_cols), milp::Relation::LessEqual, lp.upper(j) - lp.lower(j)};
      row.coeff(first[static_cast<std::size_t>(j)]) = 1;
      rows.push_back(std::move(row));
    }
  }
  for (auto& row : rows) {
    if (row.rhs < 0) {
      row.coeff = -row.coeff;
      row.rhs = -row.rhs;
      if (row.relation == milp::Relation::LessEqual)
        row.relation = milp::Relation::GreaterEqual;
      else if (row.relation == milp::Relation::GreaterEqual)
        row.relation = milp::Relation::LessEqual;
    }
  }

  const int r = static_cast<int>(rows.size());
  int slack_cols = 0, art_cols = 0;
  for (const auto& row : rows) {
    if (row.relation != milp::Relation::Equal) ++slack_cols;
    if (row.relation != milp::Relation::LessEqual) ++art_cols;
  }
  const int total = z_cols + slack_cols + art_cols;
  Tableau tab(r, total);
  std::vector<bool> is_art(static_cast<std::size_t>(total), false);
  int next_slack = z_cols, next_art = z_cols + slack_cols;
  for (int i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < z_cols; ++j) tab.at(i, j) = row.coeff(j);
    tab.rhs(i) = row.rhs;
    if (row.relation == milp::Relation::LessEqual) {
      tab.at(i, next_slack) = 1;
      tab.basis()[static_cast<std::size_t>(i)] = next_slack++;
    } else {
      if (row.relation == milp::Relation::GreaterEqual) tab.at(i, next_slack++) = -1;
      tab.at(i, next_art) = 1;
      is_art[static_cast<std::size_t>(next_art)] = true;
      tab.basis()[static_cast<std::size_t>(i)] = next_art++;
    }
  }

  long budget = 200000;
  DenseLpResult result;

  // phase one: maximize -sum(artificials)
  if (art_cols > 0) {
    for (int j = 0; j < total; ++j) tab.obj(j) = is_art[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    tab.obj(total) = 0;
    for (int i = 0; i < r; ++i)
      if (is_art[static_cast<std::size_t>(tab.basis()[static_cast<std::size_t>(i)])]) {
        for (int j = 0; j <= total; ++j) tab.obj(j) -= (j == total ? tab.rhs(i) : tab.at(i, j));
      }
    std::vector<bool> allowed(static_cast<std::size_t>(total), true);
    bool unbounded = false;
    if (!tab.optimize(allowed, budget, unbounded)) return result;
    if (tab.objective_value() < -1e-7) {
      result.status = milp::Status::Infeasible;
      return result;
    }
    for (int i = 0; i < r; ++i) {
      if (!is_art[static_cast<std::size_t>(tab.basis()[static_cast<std::size_t>(i)])]) continue;
      for (int j = 0; j < total; ++j)
        if (!is_art[static_cast<std::size_t>(j)] && std::abs(tab.at(i, j)) > kEps) {
          tab.pivot(i, j);
          break;
        }
    }
  }

  // phase two
  Eigen::VectorXd z_cost = Eigen::VectorXd::Zero(z_cols);
  double offset = 0;
  for (int j = 0; j < n; ++j) {
    const int z = first[static_cast<std::size_t>(j)];
    switch (shift[static_cast<std::size_t>(j)]) {
      case Shift::FromLower: z_cost(z) += lp.cost(j); offset += lp.cost(j) * lp.lower(j); break;
      case Shift::FromUpper: z_cost(z) -= lp.cost(j); offset += lp.cost(j) * lp.upper(j); break;
      case Shift::Split: z_cost(z) += lp.cost(j); z_cost(z + 1) -= lp.cost(j); break;
    }
  }
  for (int j = 0; j <= total; ++j) tab.obj(j) = j < z_cols ? -z_cost(j) : 0.0;
  for (int i = 0; i < r; ++i) {
    const int b = tab.basis()[static_cast<std::size_t>(i)];
    const double c = tab.obj(b);
    if (c == 0.0) continue;
    for (int j = 0; j <= total; ++j) tab.obj(j) -= c * (j == total ? tab.rhs(i) : tab.at(i, j));
  }
  std::vector<bool> allowed(static_cast<std::size_t>(total));
  for (int j = 0; j < total; ++j) allowed[static_cast<std::size_t>(j)] = !is_art[static_cast<std::size_t>(j)];
  bool unbounded = false;
  if (!tab.optimize(allowed, budget, unbounded)) return result;
  if (unbounded) {
    result.status = milp::Status::Unbounded;
    return result;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(total);
  for (int i = 0; i < r; ++i) z(tab.basis()[static_cast<std::size_t>(i)]) = tab.rhs(i);
  result.x.resize(n);
  for (int j = 0; j < n; ++j) {
    const int k = first[static_cast<std::size_t>(j)];
    switch (shift[static_cast<std::size_t>(j)]) {
      case Shift::FromLower: result.x(j) = lp.lower(j) + z(k); break;
      case Shift::FromUpper: result.x(j) = lp.upper(j) - z(k); break;
      case Shift::Split: result.x(j) = z(k) - z(k + 1); break;
    }
  }
  result.objective = tab.objective_value() + offset;
  result.status = milp::Status::Optimal;
  return result;
}

DenseLpResult solve_dense_lp(const DenseLp& lp) {
#ifdef INVCERT_ORACLE_USE_LP_SOLVE
  milp::Model model;
  const auto n = static_cast<int>(lp.cost.size());
  for (int j = 0; j < n; ++j) model.add_continuous("x" + std::to_string(j), lp.lower(j), lp.upper(j));
  for (Eigen::Index i = 0; i < lp.a.rows(); ++i) {
    std::vector<milp::Term> terms;
    for (int j = 0; j < n; ++j)
      if (lp.a(i, j) != 0.0) terms.push_back({j, lp.a(i, j)});
    model.add_constraint(std::move(terms), lp.relation[static_cast<std::size_t>(i)], lp.rhs(i));
  }
  std::vector<milp::Term> objective;
  for (int j = 0; j < n; ++j)
    if (lp.cost(j) != 0.0) objective.push_back({j, lp.cost(j)});
  model.set_objective(std::move(objective));
  const auto solved = milp::lp_solve(model, false);
  return {solved.status, solved.objective, solved.values};
#else
  return tableau_lp_max(lp);
#endif
}

}  // namespace invcert::oracle
