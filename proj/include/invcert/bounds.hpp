// Interval bound propagation through a ReLU perceptron.
#pragma once

#include "invcert/network.hpp"

#include <limits>
#include <string_view>

namespace invcert {

enum class Norm { Linf, L1 };

inline std::string_view to_string(Norm norm) { return norm == Norm::Linf ? "linf" : "l1"; }

/// Closed ball of radius `radius` around `center` in the given norm.
template <typename Scalar>
struct BasicInputBox {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector center;
  Scalar radius = 0;
  Norm norm = Norm::Linf;

  BasicInputBox() = default;
  BasicInputBox(Vector c, Scalar r, Norm q = Norm::Linf) : center(std::move(c)), radius(r), norm(q) {
    if (!(radius >= 0)) throw std::invalid_argument("box radius must be nonnegative");
  }

  Eigen::Index dim() const { return center.size(); }

  /// Membership with an absolute slack.
  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x, Scalar slack = 0) const {
    if (x.size() != center.size()) return false;
    const Scalar dist = norm == Norm::Linf ? (x - center).template lpNorm<Eigen::Infinity>()
                                           : (x - center).template lpNorm<1>();
    return dist <= radius + slack;
  }
};

using InputBox = BasicInputBox<double>;

/// Pre-activation bounds: entry k bounds W_k x_k + b_k. The last entry is the
/// network output interval.
template <typename Scalar>
struct BasicIntervalBounds {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  std::vector<Vector> lower;
  std::vector<Vector> upper;

  std::size_t layers() const { return lower.size(); }
  const Vector& output_lower() const { return lower.back(); }
  const Vector& output_upper() const { return upper.back(); }

  /// Units whose sign is not decided by the bounds, over hidden layers only.
  Eigen::Index undetermined_units() const {
    Eigen::Index count = 0;
    for (std::size_t k = 0; k + 1 < lower.size(); ++k)
      count += ((lower[k].array() < Scalar(0)) && (upper[k].array() > Scalar(0))).count();
    return count;
  }
};

using IntervalBounds = BasicIntervalBounds<double>;

/// Midpoint/radius interval arithmetic. An L1 box is enclosed in its L-inf
/// bounding box. A zero-radius box reproduces forward_trace exactly; for
/// positive radii the bounds are widened by a floating-point error term so
/// they stay sound under rounding.
template <typename Scalar>
BasicIntervalBounds<Scalar> propagate_interval(const BasicReluMlp<Scalar>& net, const BasicInputBox<Scalar>& box) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (box.dim() != net.input_dim())
    throw DimensionError("box has dimension " + std::to_string(box.dim()) + ", network expects " +
                         std::to_string(net.input_dim()));
  constexpr Scalar kRounding = 64 * std::numeric_limits<Scalar>::epsilon();
  const bool exact = box.radius == Scalar(0);

  BasicIntervalBounds<Scalar> bounds;
  Vector mid = box.center;
  Vector rad = Vector::Constant(box.dim(), box.radius);
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& w = layers[k].weight;
    Vector pre_mid = w * mid + layers[k].bias;
    Vector pre_rad = w.cwiseAbs() * rad;
    if (!exact) {
      const Vector magnitude = w.cwiseAbs() * (mid.cwiseAbs() + rad) + layers[k].bias.cwiseAbs();
      pre_rad += kRounding * (magnitude + Vector::Ones(magnitude.size()));
    }
    Vector lo = pre_mid - pre_rad;
    Vector hi = pre_mid + pre_rad;
    if (k + 1 < layers.size()) {
      const Vector act_lo = lo.cwiseMax(Scalar(0));
      const Vector act_hi = hi.cwiseMax(Scalar(0));
      if (exact) {
        mid = act_lo;
        rad.setZero(act_lo.size());
      } else {
        mid = (act_lo + act_hi) / Scalar(2);
        rad = (act_hi - act_lo) / Scalar(2);
      }
    }
    bounds.lower.push_back(std::move(lo));
    bounds.upper.push_back(std::move(hi));
  }
  return bounds;
}

/// Interval enclosing f(x) over the box: (lower, upper).
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> output_bounds(
    const BasicReluMlp<Scalar>& net, const BasicInputBox<Scalar>& box) {
  auto bounds = propagate_interval(net, box);
  return {std::move(bounds.lower.back()), std::move(bounds.upper.back())};
}

}  // namespace invcert
