// Fully-connected ReLU networks: representation, evaluation and the
// structural rewrites used before certification (residual flattening,
// parameter embedding, magnitude pruning).
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace invcert {

/// Thrown when vector or matrix shapes do not chain.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
struct DenseLayer {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix weight;
  Vector bias;

  Eigen::Index inputs() const { return weight.cols(); }
  Eigen::Index outputs() const { return weight.rows(); }
};

/// Per hidden layer, true where the unit's pre-activation is strictly positive.
using ActivationPattern = std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>>;

/// An l-layer ReLU perceptron: every layer but the last is followed by
/// max(., 0); the last layer is affine. Immutable after construction.
template <typename Scalar>
class BasicReluMlp {
 public:
  using Layer = DenseLayer<Scalar>;
  using Matrix = typename Layer::Matrix;
  using Vector = typename Layer::Vector;

  BasicReluMlp() = default;

  explicit BasicReluMlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw DimensionError("network needs at least one affine layer");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const auto& layer = layers_[k];
      if (layer.bias.size() != layer.weight.rows())
        throw DimensionError("layer " + std::to_string(k) + ": bias length does not match weight rows");
      if (layer.weight.rows() == 0 || layer.weight.cols() == 0)
        throw DimensionError("layer " + std::to_string(k) + ": empty weight matrix");
      if (k > 0 && layer.weight.cols() != layers_[k - 1].weight.rows())
        throw DimensionError("layer " + std::to_string(k) + ": shape chain broken (cols " +
                             std::to_string(layer.weight.cols()) + " vs previous rows " +
                             std::to_string(layers_[k - 1].weight.rows()) + ")");
      if (!layer.weight.allFinite() || !layer.bias.allFinite())
        throw std::invalid_argument("layer " + std::to_string(k) + ": non-finite entry");
    }
  }

  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(std::size_t k) const { return layers_.at(k); }

  Eigen::Index input_dim() const { return layers_.front().inputs(); }
  Eigen::Index output_dim() const { return layers_.back().outputs(); }

  /// Number of ReLU layers.
  std::size_t hidden_layers() const { return layers_.size() - 1; }

  std::vector<Eigen::Index> hidden_widths() const {
    std::vector<Eigen::Index> widths;
    for (std::size_t k = 0; k + 1 < layers_.size(); ++k) widths.push_back(layers_[k].outputs());
    return widths;
  }

  /// Total hidden neurons n.
  Eigen::Index hidden_units() const {
    Eigen::Index n = 0;
    for (auto w : hidden_widths()) n += w;
    return n;
  }

  bool empty() const { return layers_.empty(); }

 private:
  std::vector<Layer> layers_;
};

using ReluMlp = BasicReluMlp<double>;

/// Residual network: each block maps x to x + block(x) on a shared R^m.
template <typename Scalar>
class BasicResidualNet {
 public:
  using Mlp = BasicReluMlp<Scalar>;

  BasicResidualNet() = default;

  explicit BasicResidualNet(std::vector<Mlp> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw DimensionError("residual network needs at least one block");
    const auto m = blocks_.front().input_dim();
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].input_dim() != m || blocks_[i].output_dim() != m)
        throw DimensionError("residual block " + std::to_string(i) + " is not R^" + std::to_string(m) +
                             " -> R^" + std::to_string(m));
    }
  }

  const std::vector<Mlp>& blocks() const { return blocks_; }
  Eigen::Index dim() const { return blocks_.front().input_dim(); }

 private:
  std::vector<Mlp> blocks_;
};

using ResidualNet = BasicResidualNet<double>;

namespace detail {
template <typename Scalar>
void check_input(const BasicReluMlp<Scalar>& net, Eigen::Index size) {
  if (size != net.input_dim())
    throw DimensionError("input has dimension " + std::to_string(size) + ", network expects " +
                         std::to_string(net.input_dim()));
}
}  // namespace detail

template <typename Scalar, typename Derived>
typename BasicReluMlp<Scalar>::Vector forward(const BasicReluMlp<Scalar>& net,
                                              const Eigen::MatrixBase<Derived>& x) {
  detail::check_input(net, x.size());
  typename BasicReluMlp<Scalar>::Vector h = x;
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    typename BasicReluMlp<Scalar>::Vector pre = layers[k].weight * h + layers[k].bias;
    if (k + 1 < layers.size())
      h = pre.cwiseMax(Scalar(0));
    else
      h = std::move(pre);
  }
  return h;
}

template <typename Scalar>
struct ForwardTrace {
  typename BasicReluMlp<Scalar>::Vector output;
  /// W x + b for every layer including the final affine one.
  std::vector<typename BasicReluMlp<Scalar>::Vector> pre_activations;
  ActivationPattern pattern;
};

template <typename Scalar, typename Derived>
ForwardTrace<Scalar> forward_trace(const BasicReluMlp<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input(net, x.size());
  ForwardTrace<Scalar> trace;
  typename BasicReluMlp<Scalar>::Vector h = x;
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    typename BasicReluMlp<Scalar>::Vector pre = layers[k].weight * h + layers[k].bias;
    trace.pre_activations.push_back(pre);
    if (k + 1 < layers.size()) {
      // zero pre-activation counts as inactive
      trace.pattern.push_back((pre.array() > Scalar(0)));
      h = pre.cwiseMax(Scalar(0));
    } else {
      h = std::move(pre);
    }
  }
  trace.output = std::move(h);
  return trace;
}

/// Jacobian of the affine piece selected by `pattern`.
template <typename Scalar>
typename BasicReluMlp<Scalar>::Matrix pattern_jacobian(const BasicReluMlp<Scalar>& net,
                                                       const ActivationPattern& pattern) {
  const auto& layers = net.layers();
  if (pattern.size() != net.hidden_layers()) throw DimensionError("pattern depth does not match network");
  typename BasicReluMlp<Scalar>::Matrix jac = layers.front().weight;
  for (std::size_t k = 1; k < layers.size(); ++k) {
    const auto& mask = pattern[k - 1];
    if (mask.size() != jac.rows()) throw DimensionError("pattern width does not match layer");
    for (Eigen::Index i = 0; i < jac.rows(); ++i)
      if (!mask(i)) jac.row(i).setZero();
    jac = (layers[k].weight * jac).eval();
  }
  return jac;
}

template <typename Scalar, typename Derived>
typename BasicReluMlp<Scalar>::Matrix jacobian(const BasicReluMlp<Scalar>& net,
                                               const Eigen::MatrixBase<Derived>& x) {
  return pattern_jacobian(net, forward_trace(net, x).pattern);
}

template <typename Scalar, typename Derived>
typename BasicReluMlp<Scalar>::Vector forward(const BasicResidualNet<Scalar>& rnet,
                                              const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != rnet.dim()) throw DimensionError("input dimension does not match residual network");
  typename BasicReluMlp<Scalar>::Vector h = x;
  for (const auto& block : rnet.blocks()) h = (h + forward(block, h)).eval();
  return h;
}

/// Rewrites a residual network as a plain ReLU perceptron. Each block's
/// skip connection is carried through its hidden layers by the pair
/// g(x) - g(-x), widening every hidden layer by 2m. Consecutive blocks are
/// joined by multiplying the last affine layer of one into the first of the
/// next, so the hidden depth is the sum of the block depths.
template <typename Scalar>
BasicReluMlp<Scalar> flatten_residual(const BasicResidualNet<Scalar>& rnet) {
  using Layer = DenseLayer<Scalar>;
  using Matrix = typename Layer::Matrix;
  using Vector = typename Layer::Vector;
  const Eigen::Index m = rnet.dim();
  const Matrix eye = Matrix::Identity(m, m);

  std::vector<Layer> out;
  for (const auto& block : rnet.blocks()) {
    const auto& layers = block.layers();
    std::vector<Layer> flat;
    if (layers.size() == 1) {
      flat.push_back({layers[0].weight + eye, layers[0].bias});
    } else {
      const std::size_t last = layers.size() - 1;
      for (std::size_t k = 0; k <= last; ++k) {
        const auto& w = layers[k].weight;
        const auto& b = layers[k].bias;
        Layer layer;
        if (k == 0) {
          layer.weight = Matrix::Zero(w.rows() + 2 * m, m);
          layer.weight.topRows(w.rows()) = w;
          layer.weight.block(w.rows(), 0, m, m) = eye;
          layer.weight.block(w.rows() + m, 0, m, m) = -eye;
          layer.bias = Vector::Zero(w.rows() + 2 * m);
          layer.bias.head(w.rows()) = b;
        } else if (k < last) {
          layer.weight = Matrix::Zero(w.rows() + 2 * m, w.cols() + 2 * m);
          layer.weight.topLeftCorner(w.rows(), w.cols()) = w;
          layer.weight.block(w.rows(), w.cols(), m, m) = eye;
          layer.weight.block(w.rows() + m, w.cols() + m, m, m) = eye;
          layer.bias = Vector::Zero(w.rows() + 2 * m);
          layer.bias.head(w.rows()) = b;
        } else {
          layer.weight = Matrix::Zero(m, w.cols() + 2 * m);
          layer.weight.leftCols(w.cols()) = w;
          layer.weight.block(0, w.cols(), m, m) = eye;
          layer.weight.block(0, w.cols() + m, m, m) = -eye;
          layer.bias = b;
        }
        flat.push_back(std::move(layer));
      }
    }

    if (out.empty()) {
      out = std::move(flat);
    } else {
      // merge affine tail of the previous block into the head of this one
      Layer& tail = out.back();
      Layer merged{flat.front().weight * tail.weight, flat.front().weight * tail.bias + flat.front().bias};
      tail = std::move(merged);
      out.insert(out.end(), std::make_move_iterator(flat.begin() + 1), std::make_move_iterator(flat.end()));
    }
  }
  return BasicReluMlp<Scalar>(std::move(out));
}

/// Fixes the last input coordinate to `p` by folding it into the first bias.
template <typename Scalar>
BasicReluMlp<Scalar> embed_parameter(const BasicReluMlp<Scalar>& net, Scalar p) {
  if (net.input_dim() < 2) throw DimensionError("parameter embedding needs at least two inputs");
  auto layers = net.layers();
  auto& first = layers.front();
  const Eigen::Index d = first.weight.cols() - 1;
  first.bias = (first.bias + p * first.weight.col(d)).eval();
  first.weight = first.weight.leftCols(d).eval();
  return BasicReluMlp<Scalar>(std::move(layers));
}

/// Same as above, but checks the caller's expected state dimension.
template <typename Scalar>
BasicReluMlp<Scalar> embed_parameter(const BasicReluMlp<Scalar>& net, Eigen::Index state_dim, Scalar p) {
  if (net.input_dim() != state_dim + 1)
    throw DimensionError("network has " + std::to_string(net.input_dim()) + " inputs, expected " +
                         std::to_string(state_dim + 1));
  return embed_parameter(net, p);
}

/// Zeroes the floor(sparsity * #weights) smallest-magnitude weight entries
/// (biases untouched). Equal magnitudes are ordered by a seeded random key,
/// so the pruned sets are nested in `sparsity` for a fixed seed.
template <typename Scalar>
BasicReluMlp<Scalar> prune_magnitude(const BasicReluMlp<Scalar>& net, double sparsity, std::uint64_t seed) {
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw std::invalid_argument("sparsity must lie in [0, 1]");
  struct Entry {
    Scalar magnitude;
    std::uint64_t key;
    std::size_t layer;
    Eigen::Index row, col;
  };
  std::mt19937_64 rng(seed);
  std::vector<Entry> entries;
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k)
    for (Eigen::Index j = 0; j < layers[k].weight.cols(); ++j)
      for (Eigen::Index i = 0; i < layers[k].weight.rows(); ++i)
        entries.push_back({std::abs(layers[k].weight(i, j)), rng(), k, i, j});

  const auto count = static_cast<std::size_t>(std::floor(sparsity * static_cast<double>(entries.size())));
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.magnitude != b.magnitude) return a.magnitude < b.magnitude;
    return a.key < b.key;
  });

  auto pruned = layers;
  for (std::size_t e = 0; e < count; ++e) pruned[entries[e].layer].weight(entries[e].row, entries[e].col) = Scalar(0);
  return BasicReluMlp<Scalar>(std::move(pruned));
}

/// Multiplies every nonzero weight by 1 + u, u uniform in [-relative,
/// relative]; pruned zeros and biases stay put.
template <typename Scalar>
BasicReluMlp<Scalar> perturb_weights(const BasicReluMlp<Scalar>& net, double relative, std::uint64_t seed) {
  if (!(relative >= 0.0 && relative < 1.0)) throw std::invalid_argument("relative perturbation must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-relative, relative);
  auto layers = net.layers();
  for (auto& layer : layers)
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
        if (layer.weight(i, j) != Scalar(0)) layer.weight(i, j) *= Scalar(1 + dist(rng));
  return BasicReluMlp<Scalar>(std::move(layers));
}

/// Seeded network with weights and biases i.i.d. uniform in [-scale, scale].
/// Without a scale each layer uses 1/sqrt(fan-in).
template <typename Scalar = double>
BasicReluMlp<Scalar> random_network(const std::vector<Eigen::Index>& dims, std::optional<Scalar> scale,
                                    std::uint64_t seed) {
  if (dims.size() < 2) throw DimensionError("random network needs at least input and output widths");
  for (auto d : dims)
    if (d <= 0) throw DimensionError("layer widths must be positive");
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer<Scalar>> layers;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const Scalar s = scale ? *scale : Scalar(1) / std::sqrt(Scalar(dims[k]));
    std::uniform_real_distribution<Scalar> dist(-s, s);
    DenseLayer<Scalar> layer;
    layer.weight.resize(dims[k + 1], dims[k]);
    layer.bias.resize(dims[k + 1]);
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = dist(rng);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = dist(rng);
    layers.push_back(std::move(layer));
  }
  return BasicReluMlp<Scalar>(std::move(layers));
}

/// Largest singular value of a dense matrix.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& w) {
  if (w.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(w);
  return svd.singularValues()(0);
}

/// Rescales every layer so the product of spectral norms is at most
/// `lipschitz`, which makes x + block(x) a bi-Lipschitz map when < 1.
template <typename Scalar>
BasicReluMlp<Scalar> make_contractive(const BasicReluMlp<Scalar>& block, Scalar lipschitz) {
  auto layers = block.layers();
  const Scalar per_layer = std::pow(lipschitz, Scalar(1) / Scalar(layers.size()));
  for (auto& layer : layers) {
    const Scalar norm = spectral_norm(layer.weight);
    if (norm > per_layer) layer.weight *= per_layer / norm;
  }
  return BasicReluMlp<Scalar>(std::move(layers));
}

}  // namespace invcert
