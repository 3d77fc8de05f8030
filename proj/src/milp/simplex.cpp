#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace invcert::milp::detail {
namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-7;
constexpr int kReinvertEvery = 1024;
constexpr int kVerifyAfter = 768;
constexpr int kDegenerateBeforeBland = 50;
constexpr int kMaxRestarts = 2;

}  // namespace

SimplexEngine::SimplexEngine(const Model& model) {
  model.validate();
  n_ = model.num_variables();
  base_lb_.resize(n_);
  base_ub_.resize(n_);
  for (int j = 0; j < n_; ++j) {
    base_lb_(j) = model.variable(j).lower;
    base_ub_(j) = model.variable(j).upper;
  }

  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<std::pair<double, double>> row_bounds;
  for (const auto& c : model.constraints()) {
    std::map<int, double> merged;
    for (const auto& t : c.terms) merged[t.var] += t.coeff;
    std::vector<std::pair<int, double>> row;
    for (const auto& [var, coeff] : merged)
      if (coeff != 0.0) row.emplace_back(var, coeff);

    double lo = -kInf, hi = kInf;
    if (c.relation != Relation::LessEqual) lo = c.rhs;
    if (c.relation != Relation::GreaterEqual) hi = c.rhs;

    if (row.empty()) {
      if (lo > primal_tol(lo) || hi < -primal_tol(hi)) presolve_infeasible_ = true;
      continue;
    }
    if (row.size() == 1) {
      // singleton row: fold into the variable bounds
      const auto [var, coeff] = row.front();
      double vlo = lo / coeff, vhi = hi / coeff;
      if (coeff < 0) std::swap(vlo, vhi);
      base_lb_(var) = std::max(base_lb_(var), vlo);
      base_ub_(var) = std::min(base_ub_(var), vhi);
      continue;
    }
    double scale = 0;
    for (const auto& [var, coeff] : row) scale = std::max(scale, std::abs(coeff));
    for (auto& entry : row) entry.second /= scale;
    rows.push_back(std::move(row));
    row_bounds.emplace_back(lo / scale, hi / scale);
  }
  for (int j = 0; j < n_; ++j)
    if (base_lb_(j) > base_ub_(j) + primal_tol(base_ub_(j))) presolve_infeasible_ = true;

  m_ = static_cast<int>(rows.size());
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < m_; ++i)
    for (const auto& [var, coeff] : rows[static_cast<std::size_t>(i)]) entries.emplace_back(i, var, coeff);
  a_.resize(m_, n_);
  a_.setFromTriplets(entries.begin(), entries.end());

  cost_ = Eigen::VectorXd::Zero(n_ + m_);
  for (const auto& t : model.objective()) cost_(t.var) += t.coeff;

  lb_.resize(n_ + m_);
  ub_.resize(n_ + m_);
  x_ = Eigen::VectorXd::Zero(n_ + m_);
  for (int i = 0; i < m_; ++i) {
    lb_(n_ + i) = row_bounds[static_cast<std::size_t>(i)].first;
    ub_(n_ + i) = row_bounds[static_cast<std::size_t>(i)].second;
  }
  reset_bounds();
  place_.assign(static_cast<std::size_t>(n_ + m_), Place::Lower);
  head_.assign(static_cast<std::size_t>(m_), 0);
}

double SimplexEngine::primal_tol(double bound) const {
  return kPrimalTol * std::max(1.0, std::isfinite(bound) ? std::abs(bound) : 1.0);
}

void SimplexEngine::set_bounds(int j, double lower, double upper) {
  lb_(j) = std::max(lower, base_lb_(j));
  ub_(j) = std::min(upper, base_ub_(j));
}

void SimplexEngine::reset_bounds() {
  lb_.head(n_) = base_lb_;
  ub_.head(n_) = base_ub_;
}

void SimplexEngine::slack_basis() {
  for (int j = 0; j < n_ + m_; ++j) place_[static_cast<std::size_t>(j)] = Place::Lower;
  for (int i = 0; i < m_; ++i) {
    head_[static_cast<std::size_t>(i)] = n_ + i;
    place_[static_cast<std::size_t>(n_ + i)] = Place::Basic;
  }
  binv_ = -Eigen::MatrixXd::Identity(m_, m_);
  pivots_since_reinvert_ = 0;
  basis_valid_ = true;
}

void SimplexEngine::place_nonbasic(int j) {
  auto& place = place_[static_cast<std::size_t>(j)];
  if (place == Place::Basic) return;
  const bool has_lo = std::isfinite(lb_(j));
  const bool has_hi = std::isfinite(ub_(j));
  if (has_lo && has_hi) {
    if (place == Place::Upper && lb_(j) < ub_(j)) {
      x_(j) = ub_(j);
    } else {
      place = Place::Lower;
      x_(j) = lb_(j);
    }
  } else if (has_lo) {
    place = Place::Lower;
    x_(j) = lb_(j);
  } else if (has_hi) {
    place = Place::Upper;
    x_(j) = ub_(j);
  } else {
    place = Place::Free;
    x_(j) = 0;
  }
}

bool SimplexEngine::reinvert() {
  if (m_ == 0) return true;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) {
    const int var = head_[static_cast<std::size_t>(i)];
    if (var < n_)
      basis.col(i) = Eigen::VectorXd(a_.col(var));
    else
      basis(var - n_, i) = -1.0;
  }
  // the rcond estimate misses exactly singular bases, so check U's diagonal
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > 1e-11 * std::max(1.0, pivots.maxCoeff()))) return false;
  binv_ = lu.inverse();
  if (!binv_.allFinite()) return false;
  pivots_since_reinvert_ = 0;
  return true;
}

void SimplexEngine::compute_basic_values() {
  if (m_ == 0) return;
  Eigen::VectorXd xs = x_.head(n_);
  Eigen::VectorXd xl = x_.tail(m_);
  for (int i = 0; i < m_; ++i) {
    const int var = head_[static_cast<std::size_t>(i)];
    if (var < n_)
      xs(var) = 0;
    else
      xl(var - n_) = 0;
  }
  const Eigen::VectorXd rhs = a_ * xs - xl;
  const Eigen::VectorXd basic = -(binv_ * rhs);
  for (int i = 0; i < m_; ++i) x_(head_[static_cast<std::size_t>(i)]) = basic(i);
}

Eigen::VectorXd SimplexEngine::reduced_costs() const {
  Eigen::VectorXd basic_cost(m_);
  for (int i = 0; i < m_; ++i) basic_cost(i) = cost_(head_[static_cast<std::size_t>(i)]);
  const Eigen::VectorXd duals = binv_.transpose() * basic_cost;
  Eigen::VectorXd reduced(n_ + m_);
  reduced.head(n_) = cost_.head(n_) - a_.transpose() * duals;
  reduced.tail(m_) = duals;
  for (int i = 0; i < m_; ++i) reduced(head_[static_cast<std::size_t>(i)]) = 0;
  return reduced;
}

bool SimplexEngine::dual_feasible(const Eigen::VectorXd& reduced) const {
  for (int j = 0; j < n_ + m_; ++j) {
    const auto place = place_[static_cast<std::size_t>(j)];
    if (place == Place::Basic || lb_(j) == ub_(j)) continue;
    const double d = reduced(j);
    if (place == Place::Lower && d > kDualTol) return false;
    if (place == Place::Upper && d < -kDualTol) return false;
    if (place == Place::Free && std::abs(d) > kDualTol) return false;
  }
  return true;
}

void SimplexEngine::pivot(int row, int entering, const Eigen::VectorXd& alpha) {
  place_[static_cast<std::size_t>(entering)] = Place::Basic;
  head_[static_cast<std::size_t>(row)] = entering;
  const Eigen::RowVectorXd pivot_row = binv_.row(row) / alpha(row);
  binv_.noalias() -= alpha * pivot_row;
  binv_.row(row) = pivot_row;
  ++pivots_since_reinvert_;
}

LpStatus SimplexEngine::solve() {
  if (presolve_infeasible_) return LpStatus::Infeasible;
  for (int j = 0; j < n_; ++j)
    if (lb_(j) > ub_(j) + primal_tol(ub_(j))) return LpStatus::Infeasible;

  const long cap = 50L * (n_ + m_) + 2000;
  if (basis_valid_) {
    // after bound changes the previous optimal basis stays dual feasible
    // boxed nonbasics go to the bound their reduced cost prefers
    const Eigen::VectorXd reduced = reduced_costs();
    for (int j = 0; j < n_ + m_; ++j) {
      auto& place = place_[static_cast<std::size_t>(j)];
      if (place != Place::Basic && std::isfinite(lb_(j)) && std::isfinite(ub_(j)))
        place = reduced(j) > 0 ? Place::Upper : Place::Lower;
      place_nonbasic(j);
    }
    compute_basic_values();
    if (dual_feasible(reduced)) {
      const LpStatus status = run_dual(cap);
      if (status != LpStatus::NumericalFailure) return status;
    }
  }
  for (int attempt = 0; attempt <= kMaxRestarts; ++attempt) {
    if (!basis_valid_ || attempt > 0) slack_basis();
    for (int j = 0; j < n_ + m_; ++j) place_nonbasic(j);
    compute_basic_values();
    const LpStatus status = run(cap);
    if (status != LpStatus::NumericalFailure) return status;
  }
  basis_valid_ = false;
  return LpStatus::NumericalFailure;
}

bool SimplexEngine::infeasibility_proved(int r, const Eigen::RowVectorXd& row_alpha, bool to_lower) const {
  double residual = 0;
  for (int i = 0; i < m_; ++i) {
    const int var = head_[static_cast<std::size_t>(i)];
    const double entry = (i == r ? 1.0 : 0.0) - row_alpha(var);
    residual = std::max(residual, std::abs(entry));
  }
  if (residual > 1e-9) return false;
  const int leaving = head_[static_cast<std::size_t>(r)];
  double value = 0;
  for (int j = 0; j < n_ + m_; ++j)
    if (place_[static_cast<std::size_t>(j)] != Place::Basic) value -= row_alpha(j) * x_(j);
  const double slack = 1e-7 * (1.0 + std::abs(value));
  return to_lower ? value < lb_(leaving) - slack : value > ub_(leaving) + slack;
}

LpStatus SimplexEngine::run_dual(long iteration_cap) {
  const int total = n_ + m_;
  Eigen::VectorXd d = reduced_costs();
  Eigen::RowVectorXd row_alpha(total);
  Eigen::VectorXd alpha(m_);
  Eigen::VectorXd flip_delta(total);
  std::vector<std::pair<double, int>> candidates;
  bool verified = false;

  auto refresh = [&]() {
    if (!reinvert()) return false;
    compute_basic_values();
    d = reduced_costs();
    return true;
  };

  for (long it = 0; it < iteration_cap; ++it) {
    if (pivots_since_reinvert_ >= kReinvertEvery && !refresh()) return LpStatus::NumericalFailure;

    // leaving row: dual steepest edge, violation^2 / ||row of B^-1||^2
    int r = -1;
    double worst = 0;
    for (int i = 0; i < m_; ++i) {
      const int var = head_[static_cast<std::size_t>(i)];
      double v = 0;
      if (x_(var) < lb_(var) - primal_tol(lb_(var)))
        v = lb_(var) - x_(var);
      else if (x_(var) > ub_(var) + primal_tol(ub_(var)))
        v = x_(var) - ub_(var);
      if (v == 0) continue;
      const double score = v * v / binv_.row(i).squaredNorm();
      if (score > worst) {
        worst = score;
        r = i;
      }
    }
    if (r < 0) {
      if (!verified && pivots_since_reinvert_ >= kVerifyAfter) {
        if (!refresh()) return LpStatus::NumericalFailure;
        verified = true;
        if (!dual_feasible(d)) return LpStatus::NumericalFailure;
        continue;
      }
      return LpStatus::Optimal;
    }
    const int leaving = head_[static_cast<std::size_t>(r)];
    const bool to_lower = x_(leaving) < lb_(leaving);
    const double target = to_lower ? lb_(leaving) : ub_(leaving);

    row_alpha.head(n_).noalias() = binv_.row(r) * a_;
    row_alpha.tail(m_) = -binv_.row(r);

    // entering candidates move x_leaving toward its bound
    candidates.clear();
    for (int j = 0; j < total; ++j) {
      const auto place = place_[static_cast<std::size_t>(j)];
      if (place == Place::Basic || lb_(j) == ub_(j)) continue;
      const double a = to_lower ? row_alpha(j) : -row_alpha(j);
      bool ok = false;
      if (place == Place::Lower)
        ok = a < -kPivotTol;
      else if (place == Place::Upper)
        ok = a > kPivotTol;
      else
        ok = std::abs(a) > kPivotTol;
      if (ok) candidates.emplace_back(std::abs(d(j)) / std::abs(row_alpha(j)), j);
    }
    if (candidates.empty()) {
      // Farkas row: trust it if it inverts the basis and still shows the violation
      if (verified || infeasibility_proved(r, row_alpha, to_lower)) return LpStatus::Infeasible;
      if (!refresh()) return LpStatus::NumericalFailure;
      verified = true;
      continue;
    }
    std::sort(candidates.begin(), candidates.end());

    // bound flipping: pass boxed breakpoints while the dual slope stays positive
    double slope = std::abs(x_(leaving) - target);
    std::size_t first = 0;
    for (; first + 1 < candidates.size(); ++first) {
      const int j = candidates[first].second;
      const double range = ub_(j) - lb_(j);
      if (!std::isfinite(range)) break;
      const double next = slope - std::abs(row_alpha(j)) * range;
      if (next <= 0) break;
      slope = next;
    }
    // Harris pass over the remaining breakpoints for a stable pivot
    double bound = kInf;
    for (std::size_t k = first; k < candidates.size(); ++k) {
      const int j = candidates[k].second;
      bound = std::min(bound, (std::abs(d(j)) + kDualTol) / std::abs(row_alpha(j)));
    }
    int q = -1;
    double best = 0;
    for (std::size_t k = first; k < candidates.size() && candidates[k].first <= bound; ++k) {
      const int j = candidates[k].second;
      if (std::abs(row_alpha(j)) > best) {
        best = std::abs(row_alpha(j));
        q = j;
      }
    }

    if (q < n_)
      alpha.noalias() = binv_ * a_.col(q);
    else
      alpha = -binv_.col(q - n_);
    if (pivots_since_reinvert_ > 0 && std::abs(alpha(r) - row_alpha(q)) > 1e-8 * (1 + std::abs(alpha(r)))) {
      // row and column disagree: the inverse has drifted
      if (!refresh()) return LpStatus::NumericalFailure;
      continue;
    }
    verified = false;

    // flip the passed breakpoints (other than the entering one) and update x_B
    bool flipped = false;
    flip_delta.setZero();
    for (std::size_t k = 0; k < first; ++k) {
      const int j = candidates[k].second;
      if (j == q) continue;
      auto& place = place_[static_cast<std::size_t>(j)];
      const double to = place == Place::Lower ? ub_(j) : lb_(j);
      flip_delta(j) = to - x_(j);
      x_(j) = to;
      place = place == Place::Lower ? Place::Upper : Place::Lower;
      flipped = true;
    }
    if (flipped) {
      const Eigen::VectorXd moved = a_ * flip_delta.head(n_) - flip_delta.tail(m_);
      const Eigen::VectorXd change = binv_ * moved;
      for (int i = 0; i < m_; ++i) x_(head_[static_cast<std::size_t>(i)]) -= change(i);
    }

    const double theta_d = d(q) / row_alpha(q);
    d.noalias() -= theta_d * row_alpha.transpose();
    for (int i = 0; i < m_; ++i) d(head_[static_cast<std::size_t>(i)]) = 0;
    d(leaving) = -theta_d;
    d(q) = 0;

    const double step = (x_(leaving) - target) / alpha(r);
    x_(q) += step;
    for (int i = 0; i < m_; ++i) x_(head_[static_cast<std::size_t>(i)]) -= step * alpha(i);
    x_(leaving) = target;
    place_[static_cast<std::size_t>(leaving)] = to_lower ? Place::Lower : Place::Upper;
    pivot(r, q, alpha);
    ++iterations_;
  }
  return LpStatus::NumericalFailure;
}

LpStatus SimplexEngine::run(long iteration_cap) {
  const int total = n_ + m_;
  int degenerate_run = 0;
  bool bland = false;
  bool verified = false;
  Eigen::VectorXd basic_cost(m_);
  Eigen::VectorXd alpha(m_);

  for (long it = 0; it < iteration_cap; ++it) {
    if (pivots_since_reinvert_ >= kReinvertEvery) {
      if (!reinvert()) return LpStatus::NumericalFailure;
      compute_basic_values();
    }

    bool phase_one = false;
    for (int i = 0; i < m_; ++i) {
      const int var = head_[static_cast<std::size_t>(i)];
      if (x_(var) < lb_(var) - primal_tol(lb_(var))) {
        basic_cost(i) = 1.0;
        phase_one = true;
      } else if (x_(var) > ub_(var) + primal_tol(ub_(var))) {
        basic_cost(i) = -1.0;
        phase_one = true;
      } else {
        basic_cost(i) = 0.0;
      }
    }
    if (!phase_one)
      for (int i = 0; i < m_; ++i) basic_cost(i) = cost_(head_[static_cast<std::size_t>(i)]);

    const Eigen::VectorXd duals = binv_.transpose() * basic_cost;
    Eigen::VectorXd reduced = -(a_.transpose() * duals);
    if (!phase_one) reduced += cost_.head(n_);

    // pricing
    int entering = -1;
    double direction = 0;
    double best_score = 0;
    for (int j = 0; j < total; ++j) {
      const auto place = place_[static_cast<std::size_t>(j)];
      if (place == Place::Basic || lb_(j) == ub_(j)) continue;
      const double d = j < n_ ? reduced(j) : duals(j - n_);
      double score = 0, dir = 0;
      if (place == Place::Lower && d > kDualTol) {
        score = d;
        dir = 1;
      } else if (place == Place::Upper && d < -kDualTol) {
        score = -d;
        dir = -1;
      } else if (place == Place::Free && std::abs(d) > kDualTol) {
        score = std::abs(d);
        dir = d > 0 ? 1 : -1;
      }
      if (dir == 0) continue;
      if (bland) {
        entering = j;
        direction = dir;
        break;
      }
      if (score > best_score) {
        best_score = score;
        entering = j;
        direction = dir;
      }
    }

    if (entering < 0) {
      if (!verified && (phase_one || pivots_since_reinvert_ >= kVerifyAfter)) {
        // refresh the factorization before trusting the verdict
        if (!reinvert()) return LpStatus::NumericalFailure;
        compute_basic_values();
        verified = true;
        continue;
      }
      return phase_one ? LpStatus::Infeasible : LpStatus::Optimal;
    }
    verified = false;

    if (entering < n_)
      alpha.noalias() = binv_ * a_.col(entering);
    else
      alpha = -binv_.col(entering - n_);

    // Harris two-pass ratio test
    auto row_target = [&](int i, double rate, double& bound, bool& lower) -> bool {
      const int var = head_[static_cast<std::size_t>(i)];
      const double xi = x_(var);
      if (rate > 0) {
        if (xi > ub_(var) + primal_tol(ub_(var))) return false;
        if (xi < lb_(var) - primal_tol(lb_(var))) {
          bound = lb_(var);
          lower = true;
        } else {
          bound = ub_(var);
          lower = false;
        }
      } else {
        if (xi < lb_(var) - primal_tol(lb_(var))) return false;
        if (xi > ub_(var) + primal_tol(ub_(var))) {
          bound = ub_(var);
          lower = false;
        } else {
          bound = lb_(var);
          lower = true;
        }
      }
      return std::isfinite(bound);
    };

    double relaxed_max = kInf;
    for (int i = 0; i < m_; ++i) {
      if (std::abs(alpha(i)) <= kPivotTol) continue;
      const double rate = -direction * alpha(i);
      double bound;
      bool lower;
      if (!row_target(i, rate, bound, lower)) continue;
      const double xi = x_(head_[static_cast<std::size_t>(i)]);
      const double slack = rate > 0 ? primal_tol(bound) : -primal_tol(bound);
      relaxed_max = std::min(relaxed_max, (bound + slack - xi) / rate);
    }

    int leave_row = -1;
    double leave_bound = 0;
    bool leave_lower = true;
    double theta = kInf;
    double best_pivot = 0;
    if (std::isfinite(relaxed_max)) {
      for (int i = 0; i < m_; ++i) {
        if (std::abs(alpha(i)) <= kPivotTol) continue;
        const double rate = -direction * alpha(i);
        double bound;
        bool lower;
        if (!row_target(i, rate, bound, lower)) continue;
        const double xi = x_(head_[static_cast<std::size_t>(i)]);
        const double step = (bound - xi) / rate;
        if (step <= relaxed_max && std::abs(alpha(i)) > best_pivot) {
          best_pivot = std::abs(alpha(i));
          leave_row = i;
          leave_bound = bound;
          leave_lower = lower;
          theta = std::max(step, 0.0);
        }
      }
    }

    const double flip =
        std::isfinite(lb_(entering)) && std::isfinite(ub_(entering)) ? ub_(entering) - lb_(entering) : kInf;
    if (leave_row < 0 && !std::isfinite(flip)) {
      if (phase_one) return LpStatus::NumericalFailure;
      return LpStatus::Unbounded;
    }
    const bool do_flip = leave_row < 0 || flip <= theta;
    if (do_flip) theta = flip;

    if (theta <= 1e-12) {
      if (++degenerate_run > kDegenerateBeforeBland) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    x_(entering) += direction * theta;
    for (int i = 0; i < m_; ++i) x_(head_[static_cast<std::size_t>(i)]) -= direction * theta * alpha(i);
    ++iterations_;

    if (do_flip) {
      const bool to_upper = direction > 0;
      place_[static_cast<std::size_t>(entering)] = to_upper ? Place::Upper : Place::Lower;
      x_(entering) = to_upper ? ub_(entering) : lb_(entering);
      continue;
    }

    const int leaving = head_[static_cast<std::size_t>(leave_row)];
    x_(leaving) = leave_bound;
    place_[static_cast<std::size_t>(leaving)] = leave_lower ? Place::Lower : Place::Upper;
    pivot(leave_row, entering, alpha);
  }
  return LpStatus::NumericalFailure;
}

double SimplexEngine::objective() const { return cost_.head(n_).dot(x_.head(n_)); }

}  // namespace invcert::milp::detail
