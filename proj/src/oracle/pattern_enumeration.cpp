#include "invcert/oracle.hpp"

#include <cmath>

namespace invcert::oracle {
namespace {

/// One activation region: g x <= h, and on it every listed network is the
/// affine map jac x + offset.
struct Piece {
  Eigen::MatrixXd g;
  Eigen::VectorXd h;
  std::vector<Eigen::MatrixXd> jac;
  std::vector<Eigen::VectorXd> offset;
};

struct UnitRef {
  std::size_t layer;
  Eigen::Index unit;
};

std::vector<UnitRef> undetermined(const IntervalBounds& bounds) {
  std::vector<UnitRef> units;
  for (std::size_t k = 0; k + 1 < bounds.layers(); ++k)
    for (Eigen::Index j = 0; j < bounds.lower[k].size(); ++j)
      if (bounds.lower[k](j) < 0 && bounds.upper[k](j) > 0) units.push_back({k, j});
  return units;
}

void append_rows(Eigen::MatrixXd& g, Eigen::VectorXd& h, const Eigen::MatrixXd& g2, const Eigen::VectorXd& h2) {
  const auto old = g.rows();
  g.conservativeResize(old + g2.rows(), g2.cols());
  h.conservativeResize(old + h2.size());
  g.bottomRows(g2.rows()) = g2;
  h.tail(h2.size()) = h2;
}

/// Affine piece of `net` under the given signs of its undetermined units.
Piece affine_piece(const ReluMlp& net, const IntervalBounds& bounds, const std::vector<UnitRef>& units,
                   unsigned long mask) {
  const auto n0 = net.input_dim();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n0, n0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n0);
  Piece piece;
  piece.g.resize(0, n0);
  std::size_t bit = 0;
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Eigen::MatrixXd pre_a = layers[k].weight * a;
    Eigen::VectorXd pre_c = layers[k].weight * c + layers[k].bias;
    if (k + 1 == layers.size()) {
      piece.jac.push_back(std::move(pre_a));
      piece.offset.push_back(std::move(pre_c));
      break;
    }
    for (Eigen::Index j = 0; j < pre_c.size(); ++j) {
      bool active;
      if (bit < units.size() && units[bit].layer == k && units[bit].unit == j) {
        active = (mask >> bit) & 1UL;
        ++bit;
        // active: pre >= 0, inactive: pre <= 0
        const double sgn = active ? -1.0 : 1.0;
        Eigen::MatrixXd row = sgn * pre_a.row(j);
        Eigen::VectorXd rhs = Eigen::VectorXd::Constant(1, -sgn * pre_c(j));
        append_rows(piece.g, piece.h, row, rhs);
      } else {
        active = bounds.lower[k](j) >= 0;
      }
      if (!active) {
        pre_a.row(j).setZero();
        pre_c(j) = 0;
      }
    }
    a = std::move(pre_a);
    c = std::move(pre_c);
  }
  return piece;
}

/// Builds LPs over one or two copies of the input, each confined to a piece
/// and to the box.
class LpBuilder {
 public:
  LpBuilder(const InputBox& box, int copies) : box_(box), copies_(copies), n0_(static_cast<int>(box.dim())) {
    const bool l1 = box.norm == Norm::L1;
    vars_ = copies * n0_ * (l1 ? 2 : 1);
  }

  int x(int copy, int j) const { return copy * n0_ + j; }
  int vars() const { return vars_; }

  DenseLp make(const std::vector<const Piece*>& pieces) const {
    DenseLp lp;
    lp.cost = Eigen::VectorXd::Zero(vars_);
    lp.lower = Eigen::VectorXd::Zero(vars_);
    lp.upper = Eigen::VectorXd::Zero(vars_);
    for (int c = 0; c < copies_; ++c)
      for (int j = 0; j < n0_; ++j) {
        lp.lower(x(c, j)) = box_.center(j) - box_.radius;
        lp.upper(x(c, j)) = box_.center(j) + box_.radius;
      }
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    std::vector<milp::Relation> rel;
    auto add = [&](Eigen::VectorXd row, milp::Relation r, double b) {
      rows.push_back(std::move(row));
      rel.push_back(r);
      rhs.push_back(b);
    };
    for (int c = 0; c < copies_; ++c) {
      const Piece& p = *pieces[static_cast<std::size_t>(c)];
      for (Eigen::Index i = 0; i < p.g.rows(); ++i) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(vars_);
        row.segment(x(c, 0), n0_) = p.g.row(i).transpose();
        add(std::move(row), milp::Relation::LessEqual, p.h(i));
      }
      if (box_.norm == Norm::L1) {
        const int d0 = copies_ * n0_ + c * n0_;
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(vars_);
        for (int j = 0; j < n0_; ++j) {
          lp.upper(d0 + j) = box_.radius;
          Eigen::VectorXd pos = Eigen::VectorXd::Zero(vars_), neg = Eigen::VectorXd::Zero(vars_);
          pos(d0 + j) = 1;
          pos(x(c, j)) = -1;  // d >= x - c
          add(std::move(pos), milp::Relation::GreaterEqual, -box_.center(j));
          neg(d0 + j) = 1;
          neg(x(c, j)) = 1;  // d >= c - x
          add(std::move(neg), milp::Relation::GreaterEqual, box_.center(j));
          sum(d0 + j) = 1;
        }
        add(std::move(sum), milp::Relation::LessEqual, box_.radius);
      }
    }
    lp.a.resize(static_cast<Eigen::Index>(rows.size()), vars_);
    lp.rhs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      lp.a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      lp.rhs(static_cast<Eigen::Index>(i)) = rhs[i];
    }
    lp.relation = std::move(rel);
    return lp;
  }

  /// Adds rows jac_a x_a + off_a = jac_b x_b + off_b (copy b may be -1 for a
  /// fixed right-hand side `target`).
  static void add_equal(DenseLp& lp, int n0, int copy_a, const Eigen::MatrixXd& ja, const Eigen::VectorXd& oa,
                        int copy_b, const Eigen::MatrixXd& jb, const Eigen::VectorXd& ob) {
    const auto rows = ja.rows();
    const auto old = lp.a.rows();
    lp.a.conservativeResize(old + rows, Eigen::NoChange);
    lp.rhs.conservativeResize(old + rows);
    lp.a.bottomRows(rows).setZero();
    lp.a.block(old, copy_a * n0, rows, n0) = ja;
    if (copy_b >= 0) {
      lp.a.block(old, copy_b * n0, rows, n0) -= jb;
      lp.rhs.tail(rows) = ob - oa;
    } else {
      lp.rhs.tail(rows) = ob - oa;
    }
    for (Eigen::Index i = 0; i < rows; ++i) lp.relation.push_back(milp::Relation::Equal);
  }

 private:
  const InputBox& box_;
  int copies_;
  int n0_;
  int vars_;
};

std::vector<Piece> feasible_pieces(const std::vector<const ReluMlp*>& nets, const InputBox& box, long& lps) {
  std::vector<IntervalBounds> bounds;
  std::vector<std::vector<UnitRef>> units;
  for (const auto* net : nets) {
    bounds.push_back(propagate_interval(*net, box));
    units.push_back(undetermined(bounds.back()));
  }
  std::vector<Piece> pieces{Piece{Eigen::MatrixXd(0, box.dim()), Eigen::VectorXd(0), {}, {}}};
  const LpBuilder builder(box, 1);
  for (std::size_t k = 0; k < nets.size(); ++k) {
    std::vector<Piece> next;
    const unsigned long count = 1UL << units[k].size();
    for (const auto& base : pieces)
      for (unsigned long mask = 0; mask < count; ++mask) {
        Piece part = affine_piece(*nets[k], bounds[k], units[k], mask);
        Piece joined = base;
        append_rows(joined.g, joined.h, part.g, part.h);
        joined.jac.push_back(std::move(part.jac.front()));
        joined.offset.push_back(std::move(part.offset.front()));
        DenseLp lp = builder.make({&joined});
        ++lps;
        if (solve_dense_lp(lp).status == milp::Status::Optimal) next.push_back(std::move(joined));
      }
    pieces = std::move(next);
  }
  return pieces;
}

long total_undetermined(const ReluMlp& net, const InputBox& box) {
  return static_cast<long>(undetermined(propagate_interval(net, box)).size());
}

/// Objective directions on a difference vector: +-e_j for the max norm, all
/// sign vectors for the 1-norm.
std::vector<Eigen::VectorXd> norm_directions(Eigen::Index dim, Norm norm) {
  std::vector<Eigen::VectorXd> dirs;
  if (norm == Norm::Linf) {
    for (Eigen::Index j = 0; j < dim; ++j)
      for (double s : {1.0, -1.0}) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
        d(j) = s;
        dirs.push_back(std::move(d));
      }
  } else {
    for (unsigned long mask = 0; mask < (1UL << dim); ++mask) {
      Eigen::VectorXd d(dim);
      for (Eigen::Index j = 0; j < dim; ++j) d(j) = ((mask >> j) & 1UL) ? -1.0 : 1.0;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

}  // namespace

EnumerationResult pattern_enumeration_optimum(const ReluMlp& net, const InputBox& box, ProblemKind kind,
                                              int max_units) {
  if (box.dim() != net.input_dim()) throw DimensionError("box does not match network input");
  if (kind == ProblemKind::Mappability)
    throw std::invalid_argument("use pattern_enumeration_mappability for two networks");
  const long u = total_undetermined(net, box);
  const long total = kind == ProblemKind::Invertibility ? 2 * u : u;
  if (total > max_units)
    throw EnumerationCapExceeded(std::to_string(total) + " undetermined units exceed the cap of " +
                                 std::to_string(max_units));

  EnumerationResult result;
  result.x = result.y = box.center;
  const auto pieces = feasible_pieces({&net}, box, result.lps);
  result.regions = static_cast<long>(pieces.size());
  const int n0 = static_cast<int>(box.dim());
  const auto dirs = norm_directions(n0, box.norm);

  if (kind == ProblemKind::PseudoInvertibility) {
    const Eigen::VectorXd target = forward(net, box.center);
    const LpBuilder builder(box, 1);
    for (const auto& piece : pieces) {
      DenseLp base = builder.make({&piece});
      LpBuilder::add_equal(base, n0, 0, piece.jac[0], piece.offset[0], -1, {}, target);
      for (const auto& dir : dirs) {
        DenseLp lp = base;
        lp.cost.head(n0) = dir;
        ++result.lps;
        const auto sol = solve_dense_lp(lp);
        if (sol.status != milp::Status::Optimal) continue;
        const double value = sol.objective - dir.dot(box.center);
        if (value > result.optimum) {
          result.optimum = value;
          result.x = sol.x.head(n0);
        }
      }
    }
    return result;
  }

  const LpBuilder builder(box, 2);
  for (std::size_t p = 0; p < pieces.size(); ++p)
    for (std::size_t q = p; q < pieces.size(); ++q) {
      DenseLp base = builder.make({&pieces[p], &pieces[q]});
      LpBuilder::add_equal(base, n0, 0, pieces[p].jac[0], pieces[p].offset[0], 1, pieces[q].jac[0],
                           pieces[q].offset[0]);
      for (const auto& dir : dirs) {
        DenseLp lp = base;
        lp.cost.head(n0) = dir;
        lp.cost.segment(n0, n0) = -dir;
        ++result.lps;
        const auto sol = solve_dense_lp(lp);
        if (sol.status != milp::Status::Optimal) continue;
        if (sol.objective > result.optimum) {
          result.optimum = sol.objective;
          result.x = sol.x.head(n0);
          result.y = sol.x.segment(n0, n0);
        }
      }
    }
  return result;
}

EnumerationResult pattern_enumeration_mappability(const ReluMlp& f, const ReluMlp& g, const InputBox& box,
                                                  int max_units) {
  if (f.input_dim() != g.input_dim() || box.dim() != f.input_dim())
    throw DimensionError("networks and box must share the input dimension");
  const long total = 2 * (total_undetermined(f, box) + total_undetermined(g, box));
  if (total > max_units)
    throw EnumerationCapExceeded(std::to_string(total) + " undetermined units exceed the cap of " +
                                 std::to_string(max_units));

  EnumerationResult result;
  result.x = result.y = box.center;
  const auto pieces = feasible_pieces({&f, &g}, box, result.lps);
  result.regions = static_cast<long>(pieces.size());
  const int n0 = static_cast<int>(box.dim());
  const auto dirs = norm_directions(g.output_dim(), Norm::Linf);

  const LpBuilder builder(box, 2);
  for (std::size_t p = 0; p < pieces.size(); ++p)
    for (std::size_t q = p; q < pieces.size(); ++q) {
      const Piece& a = pieces[p];
      const Piece& b = pieces[q];
      DenseLp base = builder.make({&a, &b});
      LpBuilder::add_equal(base, n0, 0, a.jac[0], a.offset[0], 1, b.jac[0], b.offset[0]);
      for (const auto& dir : dirs) {
        DenseLp lp = base;
        lp.cost.head(n0) = a.jac[1].transpose() * dir;
        lp.cost.segment(n0, n0) = -(b.jac[1].transpose() * dir);
        ++result.lps;
        const auto sol = solve_dense_lp(lp);
        if (sol.status != milp::Status::Optimal) continue;
        const double value = sol.objective + dir.dot(a.offset[1] - b.offset[1]);
        if (value > result.optimum) {
          result.optimum = value;
          result.x = sol.x.head(n0);
          result.y = sol.x.segment(n0, n0);
        }
      }
    }
  return result;
}

}  // namespace invcert::oracle
