#include "invcert/encoder.hpp"

#include <stdexcept>

namespace invcert {
namespace {

using milp::Relation;
using milp::Term;

std::string indexed(const std::string& base, std::size_t i) { return base + "_" + std::to_string(i); }
std::string indexed(const std::string& base, std::size_t k, Eigen::Index j) {
  return base + "_" + std::to_string(k) + "_" + std::to_string(j);
}

void check_box(const ReluMlp& net, const InputBox& box) {
  if (box.dim() != net.input_dim())
    throw DimensionError("box has dimension " + std::to_string(box.dim()) + ", network expects " +
                         std::to_string(net.input_dim()));
}

/// Input variables bounded by the box, plus the L1 deviation rows.
std::vector<int> add_input(EncodedProblem& problem, const InputBox& box, const std::string& name) {
  auto& model = problem.model;
  std::vector<int> vars;
  for (Eigen::Index j = 0; j < box.dim(); ++j)
    vars.push_back(model.add_continuous(indexed(name, static_cast<std::size_t>(j)), box.center(j) - box.radius,
                                        box.center(j) + box.radius));
  if (box.norm == Norm::L1) {
    std::vector<int> dev;
    std::vector<Term> sum;
    for (Eigen::Index j = 0; j < box.dim(); ++j) {
      const int e = model.add_continuous(indexed(name + "_dev", static_cast<std::size_t>(j)), 0.0, box.radius);
      const int x = vars[static_cast<std::size_t>(j)];
      model.add_constraint({{e, 1.0}, {x, -1.0}}, Relation::GreaterEqual, -box.center(j));
      model.add_constraint({{e, 1.0}, {x, 1.0}}, Relation::GreaterEqual, box.center(j));
      dev.push_back(e);
      sum.push_back({e, 1.0});
    }
    model.add_constraint(std::move(sum), Relation::LessEqual, box.radius, name + "_ball");
    problem.deviation.push_back(std::move(dev));
  }
  return vars;
}

/// Encodes all hidden layers of one network copy on top of `input`.
CopyHandles encode_copy(milp::Model& model, const ReluMlp& net, const IntervalBounds& bounds,
                        std::vector<int> input, const std::string& name, const std::string& binary_name,
                        const CopyHandles* reuse = nullptr) {
  CopyHandles copy;
  copy.input = input;
  std::vector<int> current = std::move(input);
  for (std::size_t k = 0; k < net.hidden_layers(); ++k) {
    const auto& layer = net.layer(k);
    std::vector<int> out;
    for (Eigen::Index j = 0; j < layer.outputs(); ++j)
      out.push_back(model.add_continuous(indexed(name, k + 1, j), 0.0, milp::kInf));
    copy.binary.push_back(encode_relu_layer(model, current, out, layer.weight, layer.bias, bounds.lower[k],
                                            bounds.upper[k], binary_name + "_" + std::to_string(k + 1),
                                            reuse ? &reuse->binary[k] : nullptr));
    copy.hidden.push_back(out);
    current = std::move(out);
  }
  return copy;
}

const std::vector<int>& last_hidden(const CopyHandles& copy) {
  return copy.hidden.empty() ? copy.input : copy.hidden.back();
}

/// Terms of W_last h for output row i.
std::vector<Term> output_terms(const ReluMlp& net, const CopyHandles& copy, Eigen::Index i, double sign) {
  const auto& w = net.layers().back().weight;
  const auto& h = last_hidden(copy);
  std::vector<Term> terms;
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    if (w(i, j) != 0.0) terms.push_back({h[static_cast<std::size_t>(j)], sign * w(i, j)});
  return terms;
}

/// W_last h_a = W_last h_b, row by row.
void equal_outputs(milp::Model& model, const ReluMlp& net, const CopyHandles& a, const CopyHandles& b,
                   const std::string& name) {
  for (Eigen::Index i = 0; i < net.output_dim(); ++i) {
    auto terms = output_terms(net, a, i, 1.0);
    auto other = output_terms(net, b, i, -1.0);
    terms.insert(terms.end(), other.begin(), other.end());
    model.add_constraint(std::move(terms), Relation::Equal, 0.0, indexed(name, static_cast<std::size_t>(i)));
  }
}

/// Indicator gadget bounding w by max_j |diff_j| (mode Linf) or defining
/// w = sum_j |diff_j| (mode L1). `diff` supplies the terms and constant of
/// diff_j: sum(terms) + constant.
struct Difference {
  std::vector<Term> terms;
  double constant = 0;
};

std::vector<Term> scaled(std::vector<Term> terms, double s) {
  for (auto& t : terms) t.coeff *= s;
  return terms;
}

void norm_gadget(EncodedProblem& problem, const std::vector<Difference>& diffs, Norm norm, double big_m,
                 double w_upper) {
  auto& model = problem.model;
  const std::size_t n = diffs.size();
  for (std::size_t j = 0; j < n; ++j) {
    problem.indicator_pos.push_back(model.add_binary(indexed("F", j)));
    problem.indicator_neg.push_back(model.add_binary(indexed("Fp", j)));
  }
  problem.objective = model.add_continuous("w", 0.0, norm == Norm::Linf ? w_upper : static_cast<double>(n) * w_upper);

  // target <= +-diff + M(1 - F), i.e. target -+ terms + M F <= +-constant + M
  auto bound_by = [&](int target, const Difference& d, int indicator, double sign, const std::string& name) {
    std::vector<Term> terms = scaled(d.terms, -sign);
    terms.push_back({target, 1.0});
    terms.push_back({indicator, big_m});
    model.add_constraint(std::move(terms), Relation::LessEqual, sign * d.constant + big_m, name);
  };

  if (norm == Norm::Linf) {
    std::vector<Term> pick;
    for (std::size_t j = 0; j < n; ++j) {
      bound_by(problem.objective, diffs[j], problem.indicator_pos[j], 1.0, indexed("pos", j));
      bound_by(problem.objective, diffs[j], problem.indicator_neg[j], -1.0, indexed("neg", j));
      pick.push_back({problem.indicator_pos[j], 1.0});
      pick.push_back({problem.indicator_neg[j], 1.0});
    }
    model.add_constraint(std::move(pick), Relation::Equal, 1.0, "pick");
  } else {
    std::vector<Term> total{{problem.objective, -1.0}};
    for (std::size_t j = 0; j < n; ++j) {
      const int a = model.add_continuous(indexed("abs", j), 0.0, w_upper);
      problem.terms.push_back(a);
      bound_by(a, diffs[j], problem.indicator_pos[j], 1.0, indexed("pos", j));
      bound_by(a, diffs[j], problem.indicator_neg[j], -1.0, indexed("neg", j));
      model.add_constraint({{problem.indicator_pos[j], 1.0}, {problem.indicator_neg[j], 1.0}}, Relation::Equal,
                           1.0, indexed("pick", j));
      total.push_back({a, 1.0});
    }
    model.add_constraint(std::move(total), Relation::Equal, 0.0, "w_sum");
  }
  model.set_objective({{problem.objective, 1.0}});
}

}  // namespace

std::vector<int> encode_relu_layer(milp::Model& model, const std::vector<int>& in, const std::vector<int>& out,
                                   const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const std::string& prefix, const std::vector<int>* reuse) {
  const auto rows = weight.rows();
  if (static_cast<Eigen::Index>(in.size()) != weight.cols() || static_cast<Eigen::Index>(out.size()) != rows ||
      bias.size() != rows || lower.size() != rows || upper.size() != rows)
    throw DimensionError("relu layer encoding: variable and bound counts do not match the weight shape");
  if (reuse && static_cast<Eigen::Index>(reuse->size()) != rows)
    throw DimensionError("relu layer encoding: reused binaries do not match the layer width");

  std::vector<int> binaries(static_cast<std::size_t>(rows), -1);
  for (Eigen::Index j = 0; j < rows; ++j) {
    const double l = lower(j), u = upper(j);
    if (!(l <= u)) throw std::invalid_argument("relu layer encoding: lower bound exceeds upper bound");
    const int y = out[static_cast<std::size_t>(j)];
    if (u <= 0) {
      model.set_bounds(y, 0.0, 0.0);
      continue;
    }
    // terms of y - (W x)_j
    std::vector<Term> affine{{y, 1.0}};
    for (Eigen::Index i = 0; i < weight.cols(); ++i)
      if (weight(j, i) != 0.0) affine.push_back({in[static_cast<std::size_t>(i)], -weight(j, i)});
    const std::string name = prefix + "_" + std::to_string(j);
    if (l >= 0) {
      model.set_bounds(y, l, u);
      model.add_constraint(std::move(affine), Relation::Equal, bias(j), name + "_on");
      continue;
    }
    model.set_bounds(y, 0.0, u);
    int t;
    if (reuse) {
      t = (*reuse)[static_cast<std::size_t>(j)];
      if (t < 0) throw std::invalid_argument("relu layer encoding: reused binary is missing for an undetermined unit");
    } else {
      t = model.add_binary(name);
    }
    binaries[static_cast<std::size_t>(j)] = t;
    // y >= W x + b
    model.add_constraint(affine, Relation::GreaterEqual, bias(j), name + "_ge");
    // y <= W x + b - l (1 - t)
    auto upper_row = affine;
    upper_row.push_back({t, -l});
    model.add_constraint(std::move(upper_row), Relation::LessEqual, bias(j) - l, name + "_le");
    // y <= u t
    model.add_constraint({{y, 1.0}, {t, -u}}, Relation::LessEqual, 0.0, name + "_cap");
  }
  return binaries;
}

EncodedProblem encode_problem1(const ReluMlp& net, const InputBox& box, const EncodeOptions& options) {
  check_box(net, box);
  const auto bounds = propagate_interval(net, box);
  EncodedProblem problem;
  problem.kind = ProblemKind::Invertibility;
  problem.center = box.center;

  auto x0 = add_input(problem, box, "x0");
  auto y0 = add_input(problem, box, "y0");
  problem.copies.push_back(encode_copy(problem.model, net, bounds, x0, "x", "t"));
  problem.copies.push_back(encode_copy(problem.model, net, bounds, y0, "y", "s",
                                       options.shared_binaries ? &problem.copies[0] : nullptr));
  equal_outputs(problem.model, net, problem.copies[0], problem.copies[1], "same_output");

  std::vector<Difference> diffs;
  for (std::size_t j = 0; j < x0.size(); ++j) diffs.push_back({{{x0[j], 1.0}, {y0[j], -1.0}}, 0.0});
  problem.big_m = 4 * box.radius;
  norm_gadget(problem, diffs, box.norm, problem.big_m, 2 * box.radius);
  return problem;
}

EncodedProblem encode_problem2(const ReluMlp& net, const InputBox& box) {
  check_box(net, box);
  const auto bounds = propagate_interval(net, box);
  EncodedProblem problem;
  problem.kind = ProblemKind::PseudoInvertibility;
  problem.center = box.center;

  auto x0 = add_input(problem, box, "x0");
  problem.copies.push_back(encode_copy(problem.model, net, bounds, x0, "x", "t"));

  // W_last h(x) = W_last h(x_c)
  const auto trace = forward_trace(net, box.center);
  const Eigen::VectorXd target = trace.output - net.layers().back().bias;
  for (Eigen::Index i = 0; i < net.output_dim(); ++i)
    problem.model.add_constraint(output_terms(net, problem.copies[0], i, 1.0), Relation::Equal, target(i),
                                 indexed("same_output", static_cast<std::size_t>(i)));

  std::vector<Difference> diffs;
  for (std::size_t j = 0; j < x0.size(); ++j)
    diffs.push_back({{{x0[j], 1.0}}, -box.center(static_cast<Eigen::Index>(j))});
  problem.big_m = 4 * box.radius;
  norm_gadget(problem, diffs, box.norm, problem.big_m, box.radius);
  return problem;
}

EncodedProblem encode_problem3(const ReluMlp& net_a, const ReluMlp& net_b, const InputBox& box) {
  check_box(net_a, box);
  check_box(net_b, box);
  const auto bounds_a = propagate_interval(net_a, box);
  const auto bounds_b = propagate_interval(net_b, box);
  EncodedProblem problem;
  problem.kind = ProblemKind::Mappability;
  problem.center = box.center;

  auto x1 = add_input(problem, box, "x1");
  auto x2 = add_input(problem, box, "x2");
  auto& model = problem.model;
  problem.copies.push_back(encode_copy(model, net_a, bounds_a, x1, "a1", "ta1"));
  problem.copies.push_back(encode_copy(model, net_a, bounds_a, x2, "a2", "ta2"));
  problem.copies.push_back(encode_copy(model, net_b, bounds_b, x1, "b1", "tb1"));
  problem.copies.push_back(encode_copy(model, net_b, bounds_b, x2, "b2", "tb2"));
  equal_outputs(model, net_a, problem.copies[0], problem.copies[1], "same_output");

  // d_i = f_b(x1)_i - f_b(x2)_i, bounded by the output interval width
  const Eigen::VectorXd width = bounds_b.output_upper() - bounds_b.output_lower();
  const double widest = width.maxCoeff();
  std::vector<Difference> diffs;
  for (Eigen::Index i = 0; i < net_b.output_dim(); ++i) {
    const int d = model.add_continuous(indexed("d", static_cast<std::size_t>(i)), -width(i), width(i));
    problem.terms.push_back(d);
    auto terms = output_terms(net_b, problem.copies[2], i, 1.0);
    auto other = output_terms(net_b, problem.copies[3], i, -1.0);
    terms.insert(terms.end(), other.begin(), other.end());
    terms.push_back({d, -1.0});
    model.add_constraint(std::move(terms), Relation::Equal, 0.0, indexed("diff", static_cast<std::size_t>(i)));
    diffs.push_back({{{d, 1.0}}, 0.0});
  }
  problem.big_m = 2 * widest;
  std::vector<int> saved_terms = problem.terms;
  norm_gadget(problem, diffs, Norm::Linf, problem.big_m, widest);
  problem.terms = std::move(saved_terms);
  return problem;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> EncodedProblem::decode(const Eigen::VectorXd& values) const {
  auto read = [&](const std::vector<int>& vars) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(vars.size()));
    for (std::size_t j = 0; j < vars.size(); ++j) v(static_cast<Eigen::Index>(j)) = values(vars[j]);
    return v;
  };
  if (copies.empty()) throw std::logic_error("decode on an empty encoding");
  if (kind == ProblemKind::PseudoInvertibility) return {read(copies[0].input), center};
  return {read(copies[0].input), read(copies[1].input)};
}

}  // namespace invcert
