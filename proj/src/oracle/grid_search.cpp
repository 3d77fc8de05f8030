#include "invcert/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace invcert::oracle {
namespace {

/// Nodes of a uniform grid over [center - radius, center + radius]; the count
/// is odd so the center itself is a node.
Eigen::VectorXd grid_nodes(double center, double radius, int resolution) {
  const int half = std::max(1, resolution / 2);
  Eigen::VectorXd nodes(2 * half + 1);
  for (int i = -half; i <= half; ++i) nodes(i + half) = center + radius * static_cast<double>(i) / half;
  return nodes;
}

Eigen::VectorXd scalar_values(const ReluMlp& net, const Eigen::VectorXd& nodes) {
  Eigen::VectorXd values(nodes.size());
  Eigen::VectorXd x(1);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    x(0) = nodes(i);
    values(i) = forward(net, x)(0);
  }
  return values;
}

/// Level sets of the piecewise-linear interpolant through (nodes, values).
/// Prefix/suffix ranges are nested, so the first and last point attaining a
/// level are found by binary search.
class Interpolant {
 public:
  Interpolant(Eigen::VectorXd nodes, Eigen::VectorXd values) : x_(std::move(nodes)), v_(std::move(values)) {
    const auto n = v_.size();
    pre_lo_ = pre_hi_ = suf_lo_ = suf_hi_ = v_;
    for (Eigen::Index i = 1; i < n; ++i) {
      pre_lo_(i) = std::min(pre_lo_(i - 1), v_(i));
      pre_hi_(i) = std::max(pre_hi_(i - 1), v_(i));
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) {
      suf_lo_(i) = std::min(suf_lo_(i + 1), v_(i));
      suf_hi_(i) = std::max(suf_hi_(i + 1), v_(i));
    }
  }

  const Eigen::VectorXd& nodes() const { return x_; }
  const Eigen::VectorXd& values() const { return v_; }

  /// Smallest x with interpolant(x) = level; level must be attained.
  double first(double level) const {
    // smallest j with level inside the prefix range [0, j]
    Eigen::Index lo = 0, hi = v_.size() - 1;
    while (lo < hi) {
      const Eigen::Index mid = (lo + hi) / 2;
      if (pre_lo_(mid) <= level && level <= pre_hi_(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    if (lo == 0) return x_(0);
    return crossing(lo - 1, lo, level);
  }

  /// Largest x with interpolant(x) = level.
  double last(double level) const {
    Eigen::Index lo = 0, hi = v_.size() - 1;
    while (lo < hi) {
      const Eigen::Index mid = (lo + hi + 1) / 2;
      if (suf_lo_(mid) <= level && level <= suf_hi_(mid))
        lo = mid;
      else
        hi = mid - 1;
    }
    if (lo == v_.size() - 1) return x_(lo);
    return crossing(lo, lo + 1, level);
  }

  /// Every crossing of `level`, one per segment (flat segments contribute
  /// both ends).
  std::vector<double> crossings(double level) const {
    std::vector<double> out;
    for (Eigen::Index i = 0; i + 1 < v_.size(); ++i) {
      const double a = v_(i), b = v_(i + 1);
      if (level < std::min(a, b) || level > std::max(a, b)) continue;
      if (a == b) {
        out.push_back(x_(i));
        out.push_back(x_(i + 1));
      } else {
        out.push_back(crossing(i, i + 1, level));
      }
    }
    return out;
  }

 private:
  double crossing(Eigen::Index i, Eigen::Index j, double level) const {
    const double a = v_(i), b = v_(j);
    if (a == b) return level == a ? x_(i) : x_(j);
    const double t = std::clamp((level - a) / (b - a), 0.0, 1.0);
    return x_(i) + t * (x_(j) - x_(i));
  }

  Eigen::VectorXd x_, v_;
  Eigen::VectorXd pre_lo_, pre_hi_, suf_lo_, suf_hi_;
};

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

void require_1d(const ReluMlp& net, const char* what) {
  if (net.input_dim() != 1 || net.output_dim() != 1)
    throw DimensionError(std::string(what) + " needs a scalar-to-scalar network");
}

CollisionResult pairwise_collision(const ReluMlp& net, const InputBox& box, int resolution, double match_tol) {
  const auto d = box.dim();
  if (d > 2) throw DimensionError("grid collision search supports at most two inputs");
  const int per_axis = std::max(2, resolution);
  std::vector<Eigen::VectorXd> points;
  if (d == 1) {
    const auto nodes = grid_nodes(box.center(0), box.radius, per_axis);
    for (Eigen::Index i = 0; i < nodes.size(); ++i) points.push_back(scalar(nodes(i)));
  } else {
    const auto gx = grid_nodes(box.center(0), box.radius, per_axis);
    const auto gy = grid_nodes(box.center(1), box.radius, per_axis);
    for (Eigen::Index i = 0; i < gx.size(); ++i)
      for (Eigen::Index j = 0; j < gy.size(); ++j) {
        Eigen::VectorXd p(2);
        p << gx(i), gy(j);
        if (box.contains(p, 1e-12)) points.push_back(std::move(p));
      }
  }
  std::vector<Eigen::VectorXd> images;
  images.reserve(points.size());
  for (const auto& p : points) images.push_back(forward(net, p));

  CollisionResult best{0.0, box.center, box.center};
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double scale = 1.0 + std::max(images[i].cwiseAbs().maxCoeff(), images[j].cwiseAbs().maxCoeff());
      if ((images[i] - images[j]).lpNorm<Eigen::Infinity>() > match_tol * scale) continue;
      const double gap = box.norm == Norm::Linf ? (points[i] - points[j]).lpNorm<Eigen::Infinity>()
                                                : (points[i] - points[j]).lpNorm<1>();
      if (gap > best.gap) best = {gap, points[i], points[j]};
    }
  return best;
}

}  // namespace

CollisionResult grid_collision_search(const ReluMlp& net, const InputBox& box, int resolution, double match_tol) {
  if (box.dim() != net.input_dim()) throw DimensionError("box does not match network input");
  if (net.input_dim() != 1 || net.output_dim() != 1) return pairwise_collision(net, box, resolution, match_tol);

  const auto nodes = grid_nodes(box.center(0), box.radius, resolution);
  const Interpolant f(nodes, scalar_values(net, nodes));
  CollisionResult best{0.0, box.center, box.center};
  // the gap last(v) - first(v) is linear in v between node values
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    const double level = f.values()(i);
    const double a = f.first(level), b = f.last(level);
    if (b - a > best.gap) best = {b - a, scalar(a), scalar(b)};
  }
  return best;
}

CollisionResult grid_pseudo_search(const ReluMlp& net, const InputBox& box, int resolution) {
  require_1d(net, "grid pseudo search");
  const auto nodes = grid_nodes(box.center(0), box.radius, resolution);
  const Interpolant f(nodes, scalar_values(net, nodes));
  const double c = box.center(0);
  const double level = forward(net, box.center)(0);
  const double a = f.first(level), b = f.last(level);
  if (c - a >= b - c) return {c - a, scalar(a), box.center};
  return {b - c, scalar(b), box.center};
}

CollisionResult grid_mappability_search(const ReluMlp& f, const ReluMlp& g, const InputBox& box, int resolution) {
  require_1d(f, "grid mappability search");
  if (g.input_dim() != 1) throw DimensionError("grid mappability search needs a scalar-input second network");
  const auto nodes = grid_nodes(box.center(0), box.radius, resolution);
  const Interpolant fi(nodes, scalar_values(f, nodes));

  // levels: every node value plus the midpoints between consecutive sorted ones
  std::vector<double> levels(fi.values().data(), fi.values().data() + fi.values().size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t node_levels = levels.size();
  for (std::size_t i = 0; i + 1 < node_levels; ++i) levels.push_back(0.5 * (levels[i] + levels[i + 1]));

  CollisionResult best{0.0, box.center, box.center};
  for (double level : levels) {
    const auto xs = fi.crossings(level);
    if (xs.size() < 2) continue;
    std::vector<Eigen::VectorXd> gs;
    gs.reserve(xs.size());
    for (double x : xs) gs.push_back(forward(g, scalar(x)));
    for (Eigen::Index k = 0; k < gs.front().size(); ++k) {
      std::size_t lo = 0, hi = 0;
      for (std::size_t i = 1; i < gs.size(); ++i) {
        if (gs[i](k) < gs[lo](k)) lo = i;
        if (gs[i](k) > gs[hi](k)) hi = i;
      }
      const double gap = gs[hi](k) - gs[lo](k);
      if (gap > best.gap) best = {gap, scalar(xs[lo]), scalar(xs[hi])};
    }
  }
  return best;
}

Eigen::MatrixXd fd_jacobian(const VectorMap& map, const Eigen::VectorXd& x, double h) {
  if (!(h > 0)) throw std::invalid_argument("finite-difference step must be positive");
  Eigen::MatrixXd jac;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd plus = x, minus = x;
    plus(j) += h;
    minus(j) -= h;
    const Eigen::VectorXd column = (map(plus) - map(minus)) / (2 * h);
    if (j == 0) jac.resize(column.size(), x.size());
    jac.col(j) = column;
  }
  return jac;
}

}  // namespace invcert::oracle
