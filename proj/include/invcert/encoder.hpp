// MILP encodings of the three certification problems. ReLU units use the
// big-M form with interval bounds; the norm objective uses one indicator per
// coordinate and sign.
#pragma once

#include "invcert/bounds.hpp"
#include "invcert/milp.hpp"
#include "invcert/network.hpp"
#include "invcert/problem.hpp"

#include <string>
#include <vector>

namespace invcert {

/// Variables of one copy of a network inside a model.
struct CopyHandles {
  std::vector<int> input;
  /// ReLU outputs, one vector per hidden layer.
  std::vector<std::vector<int>> hidden;
  /// Activation binaries per hidden layer; -1 where the bounds fix the unit.
  std::vector<std::vector<int>> binary;
};

struct EncodedProblem {
  ProblemKind kind = ProblemKind::Invertibility;
  milp::Model model;
  /// Invertibility: x-copy, y-copy. Pseudo-invertibility: x-copy.
  /// Mappability: A(x1), A(x2), B(x1), B(x2).
  std::vector<CopyHandles> copies;
  /// F and F' indicators of the norm gadget.
  std::vector<int> indicator_pos;
  std::vector<int> indicator_neg;
  /// Per-coordinate objective terms: L1 absolute values, or the output
  /// differences of the second network for mappability.
  std::vector<int> terms;
  /// L1 ball deviation variables, per copy of the input.
  std::vector<std::vector<int>> deviation;
  int objective = -1;
  double big_m = 0;
  Eigen::VectorXd center;

  /// Input points of the two sides of the optimum: (x, y), (x, x_c) or (x1, x2).
  std::pair<Eigen::VectorXd, Eigen::VectorXd> decode(const Eigen::VectorXd& values) const;
};

struct EncodeOptions {
  /// Reuse the x-copy binaries in the y-copy. Only useful to compare with the
  /// shared-binary reading of the formulation; it over-constrains the model.
  bool shared_binaries = false;
};

/// Adds the four big-M inequalities per unit with l < 0 < u and returns the
/// binaries (-1 for units fixed by their bounds). `out` must hold one fresh
/// continuous variable per row of `weight`; their bounds are overwritten.
/// With `reuse`, those binaries are used instead of new ones.
std::vector<int> encode_relu_layer(milp::Model& model, const std::vector<int>& in, const std::vector<int>& out,
                                   const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const std::string& prefix = "t", const std::vector<int>* reuse = nullptr);

EncodedProblem encode_problem1(const ReluMlp& net, const InputBox& box, const EncodeOptions& options = {});
EncodedProblem encode_problem2(const ReluMlp& net, const InputBox& box);
/// max ||f_b(x1) - f_b(x2)||_inf subject to f_a(x1) = f_a(x2), x1, x2 in the box.
EncodedProblem encode_problem3(const ReluMlp& net_a, const ReluMlp& net_b, const InputBox& box);

}  // namespace invcert
