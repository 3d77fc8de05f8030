#include "doctest.h"
#include "support/reference.hpp"

#include "invcert/network.hpp"
#include "invcert/oracle.hpp"

#include <random>

using namespace invcert;

namespace {

Eigen::VectorXd random_point(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

std::size_t zero_weights(const ReluMlp& net) {
  std::size_t zeros = 0;
  for (const auto& layer : net.layers()) zeros += static_cast<std::size_t>((layer.weight.array() == 0.0).count());
  return zeros;
}

}  // namespace

TEST_CASE("forward agrees with the plain-loop evaluator") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto net = random_network<double>({3, 7, 5, 2}, std::nullopt, seed);
    for (int k = 0; k < 50; ++k) {
      const auto x = random_point(rng, 3, 2.0);
      CHECK(reference::max_abs_diff(reference::to_std(forward(net, x)), reference::forward(net, reference::to_std(x))) <
            1e-13);
    }
  }
}

TEST_CASE("a zero pre-activation counts as inactive") {
  ReluMlp net({{Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1)},
               {Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Zero(1)}});
  const auto trace = forward_trace(net, Eigen::VectorXd::Zero(1));
  CHECK_FALSE(trace.pattern[0](0));
  CHECK(jacobian(net, Eigen::VectorXd::Zero(1))(0, 0) == 0.0);
  CHECK(jacobian(net, Eigen::VectorXd::Constant(1, 0.1))(0, 0) == 2.0);
}

TEST_CASE("pattern Jacobian matches central differences away from kinks") {
  const auto net = random_network<double>({2, 6, 6, 2}, std::nullopt, 9);
  std::mt19937_64 rng(1);
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    const auto x = random_point(rng, 2, 1.5);
    const auto trace = forward_trace(net, x);
    double margin = 1e9;
    for (std::size_t l = 0; l + 1 < trace.pre_activations.size(); ++l)
      margin = std::min(margin, trace.pre_activations[l].cwiseAbs().minCoeff());
    if (margin < 1e-3) continue;
    const auto fd = oracle::fd_jacobian([&](const Eigen::VectorXd& p) { return forward(net, p); }, x, 1e-5);
    CHECK((fd - jacobian(net, x)).cwiseAbs().maxCoeff() < 1e-6);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("broken shape chains are rejected") {
  using L = DenseLayer<double>;
  CHECK_THROWS_AS(ReluMlp({L{Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(2)}}), DimensionError);
  CHECK_THROWS_AS(ReluMlp({L{Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3)},
                           L{Eigen::MatrixXd::Zero(1, 4), Eigen::VectorXd::Zero(1)}}),
                  DimensionError);
  CHECK_THROWS_AS(ReluMlp(std::vector<L>{}), DimensionError);
  const auto net = random_network<double>({2, 3, 1}, std::nullopt, 1);
  CHECK_THROWS_AS(forward(net, Eigen::VectorXd::Zero(3)), DimensionError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(1, 1);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(ReluMlp({L{bad, Eigen::VectorXd::Zero(1)}}), std::invalid_argument);
}

TEST_CASE("flattened residual networks reproduce the residual map") {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    std::vector<ReluMlp> blocks;
    blocks.push_back(random_network<double>({3, 5, 3}, std::nullopt, seed));
    blocks.push_back(random_network<double>({3, 4, 6, 3}, std::nullopt, seed + 10));
    blocks.push_back(random_network<double>({3, 3}, std::nullopt, seed + 20));
    blocks.push_back(random_network<double>({3, 2, 3}, std::nullopt, seed + 30));
    const ResidualNet rnet(blocks);
    const auto flat = flatten_residual(rnet);
    CHECK(flat.hidden_layers() == 1 + 2 + 0 + 1);
    for (int k = 0; k < 200; ++k) {
      const auto x = random_point(rng, 3, 3.0);
      CHECK((forward(rnet, x) - forward(flat, x)).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(reference::max_abs_diff(reference::to_std(forward(rnet, x)), reference::forward(rnet, reference::to_std(x))) <
            1e-12);
    }
  }
}

TEST_CASE("embedding a parameter equals evaluating with it appended") {
  const auto net = random_network<double>({3, 6, 2}, std::nullopt, 5);
  const auto embedded = embed_parameter(net, Eigen::Index{2}, 0.7);
  CHECK(embedded.input_dim() == 2);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto x = random_point(rng, 2, 1.0);
    Eigen::VectorXd full(3);
    full << x, 0.7;
    CHECK((forward(embedded, x) - forward(net, full)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(embed_parameter(net, Eigen::Index{3}, 0.7), DimensionError);
  CHECK_THROWS_AS(embed_parameter(random_network<double>({1, 2, 1}, std::nullopt, 1), 0.5), DimensionError);
}

TEST_CASE("magnitude pruning zeroes the smallest weights and nests in sparsity") {
  const auto net = random_network<double>({2, 32, 32, 2}, std::nullopt, 11);
  const std::size_t total = 2 * 32 + 32 * 32 + 32 * 2;
  const auto p4 = prune_magnitude(net, 0.4, 1);
  const auto p6 = prune_magnitude(net, 0.6, 1);
  CHECK(zero_weights(p4) == static_cast<std::size_t>(0.4 * total));
  CHECK(zero_weights(p6) == static_cast<std::size_t>(0.6 * total));
  double largest_pruned = 0, smallest_kept = 1e9;
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    const auto& w = net.layer(k).weight;
    const auto& q = p4.layer(k).weight;
    CHECK(net.layer(k).bias == p4.layer(k).bias);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (q(i) == 0.0) {
        largest_pruned = std::max(largest_pruned, std::abs(w(i)));
        CHECK(p6.layer(k).weight(i) == 0.0);
      } else {
        CHECK(q(i) == w(i));
        smallest_kept = std::min(smallest_kept, std::abs(w(i)));
      }
    }
  }
  CHECK(largest_pruned <= smallest_kept);
  CHECK_THROWS_AS(prune_magnitude(net, 1.5, 1), std::invalid_argument);
}

TEST_CASE("perturbation keeps pruned zeros and is seeded") {
  const auto pruned = prune_magnitude(random_network<double>({2, 8, 2}, std::nullopt, 3), 0.5, 1);
  const auto a = perturb_weights(pruned, 0.01, 7);
  const auto b = perturb_weights(pruned, 0.01, 7);
  CHECK(zero_weights(a) == zero_weights(pruned));
  for (std::size_t k = 0; k < a.layers().size(); ++k) {
    CHECK(a.layer(k).weight == b.layer(k).weight);
    const Eigen::ArrayXXd w = pruned.layer(k).weight.array();
    CHECK(((a.layer(k).weight.array() - w).abs() <= 0.01 * w.abs() + 1e-15).all());
  }
}

TEST_CASE("contractive rescaling bounds the product of spectral norms") {
  const auto block = make_contractive(random_network<double>({2, 16, 16, 2}, 2.0, 8), 0.5);
  double product = 1;
  for (const auto& layer : block.layers()) product *= spectral_norm(layer.weight);
  CHECK(product <= 0.5 + 1e-12);
  CHECK(spectral_norm(Eigen::Matrix2d(Eigen::Vector2d(3, -2).asDiagonal())) == doctest::Approx(3));
}

TEST_CASE("random networks are reproducible from the seed") {
  const auto a = random_network<double>({2, 4, 2}, std::nullopt, 42);
  const auto b = random_network<double>({2, 4, 2}, std::nullopt, 42);
  const auto c = random_network<double>({2, 4, 2}, std::nullopt, 43);
  CHECK(a.layer(0).weight == b.layer(0).weight);
  CHECK(a.layer(0).weight != c.layer(0).weight);
  CHECK(a.layer(0).weight.cwiseAbs().maxCoeff() <= 1 / std::sqrt(2.0));
}
