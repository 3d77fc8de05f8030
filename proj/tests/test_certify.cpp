#include "doctest.h"

#include "invcert/certify.hpp"
#include "invcert/oracle.hpp"

using namespace invcert;

namespace {

Eigen::VectorXd at(double v) { return Eigen::VectorXd::Constant(1, v); }

/// f(x) = max(0, x) as a one-unit network.
ReluMlp relu_net() {
  return ReluMlp({{Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)},
                  {Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)}});
}

ReluMlp identity_pair_net() {
  return ReluMlp({{(Eigen::MatrixXd(2, 1) << 1, -1).finished(), Eigen::Vector2d::Zero()},
                  {(Eigen::MatrixXd(1, 2) << 1, -1).finished(), Eigen::VectorXd::Zero(1)}});
}

}  // namespace

TEST_CASE("the identity written with a ReLU pair is invertible up to a huge cap") {
  const auto cert = largest_invertible_radius(identity_pair_net(), at(0), 1e6, 1e-3);
  CHECK(cert.at_cap);
  CHECK(cert.radius == 1e6);
  CHECK(cert.probes.size() == 1);
  CHECK_FALSE(cert.witness.has_value());
}

TEST_CASE("the flat branch of a single ReLU bounds the invertible radius") {
  const auto cert = largest_invertible_radius(relu_net(), at(1), 10, 1e-3);
  CHECK_FALSE(cert.at_cap);
  CHECK(cert.radius == doctest::Approx(1.0).epsilon(2e-3));
  REQUIRE(cert.witness.has_value());
  const auto& w = *cert.witness;
  CHECK(w.gap > cert.eps_inv);
  CHECK(std::abs(forward(relu_net(), w.x)(0) - forward(relu_net(), w.y)(0)) < 1e-7);
  CHECK(w.x(0) <= 1e-7);
  CHECK(w.y(0) <= 1e-7);
}

TEST_CASE("pseudo radius of a single ReLU") {
  const auto flat = largest_pseudo_radius(relu_net(), at(-0.5), 1.0, 1e-3);
  CHECK(flat.radius < 2e-3);
  const auto steep = largest_pseudo_radius(relu_net(), at(1.0), 1.0, 1e-3);
  CHECK(steep.at_cap);
}

TEST_CASE("1D radii follow the dense-scan oracles and R >= r") {
  for (std::uint64_t seed : {1, 2}) {
    const auto net = random_network<double>({1, 10, 10, 1}, std::nullopt, seed);
    for (double c : {-1.0, -0.3}) {
      const auto inv = largest_invertible_radius(net, at(c), 2.0, 1e-3);
      CHECK(std::abs(inv.radius - oracle::scan_invertible_radius_1d(net, c, 2.0)) <= 1e-3 + 1e-5);
      const auto pseudo = largest_pseudo_radius(net, at(c), 2.0, 1e-3, {}, &inv);
      CHECK(pseudo.radius >= inv.radius - 1e-3);
      CHECK(std::abs(pseudo.radius - oracle::scan_pseudo_radius_1d(net, c, 2.0)) <= 1e-3 + 1e-5);
      CHECK(probe_log_monotone(inv.probes, 1e-5));
    }
  }
}

TEST_CASE("exact mode logs p* at every probe and the log is monotone") {
  const auto net = random_network<double>({1, 10, 10, 1}, std::nullopt, 3);
  CertifyOptions exact;
  exact.exact = true;
  const auto cert = largest_invertible_radius(net, at(0.2), 2.0, 1e-2, exact);
  for (const auto& p : cert.probes) {
    CHECK(p.status == milp::Status::Optimal);
    CHECK(p.best_bound >= p.p_star - 1e-6);
  }
  CHECK(probe_log_monotone(cert.probes, 1e-6));
  const auto fast = largest_invertible_radius(net, at(0.2), 2.0, 1e-2);
  CHECK(fast.radius == cert.radius);
}

TEST_CASE("monotonicity check on hand-made logs") {
  using milp::Status;
  std::vector<Probe> good{{1.0, 0.5, Status::Optimal, 0.5, false}, {0.5, 0.2, Status::Optimal, 0.2, false},
                          {0.75, 0.3, Status::Cutoff, 0.9, false}};
  CHECK(probe_log_monotone(good, 1e-6));
  std::vector<Probe> bad{{0.5, 0.4, Status::Optimal, 0.4, false}, {1.0, 0.1, Status::Optimal, 0.1, false}};
  CHECK_FALSE(probe_log_monotone(bad, 1e-6));
  std::vector<Probe> loose{{0.5, 0.4, Status::Cutoff, 0.4, false}, {1.0, 0.3, Status::Cutoff, 0.6, false}};
  CHECK(probe_log_monotone(loose, 1e-6));
}

TEST_CASE("certificates survive a JSON round trip") {
  const auto cert = largest_invertible_radius(relu_net(), at(1), 10, 1e-2);
  const auto back = certificate_from_json(certificate_to_json(cert));
  CHECK(back.kind == cert.kind);
  CHECK(back.radius == cert.radius);
  CHECK(back.at_cap == cert.at_cap);
  CHECK(back.eps_r == cert.eps_r);
  CHECK(back.eps_inv == cert.eps_inv);
  REQUIRE(back.probes.size() == cert.probes.size());
  for (std::size_t k = 0; k < cert.probes.size(); ++k) {
    CHECK(back.probes[k].r == cert.probes[k].r);
    CHECK(back.probes[k].p_star == cert.probes[k].p_star);
    CHECK(back.probes[k].status == cert.probes[k].status);
    CHECK(back.probes[k].invertible == cert.probes[k].invertible);
  }
  REQUIRE(back.witness.has_value());
  CHECK(back.witness->x == cert.witness->x);
  CHECK_THROWS(certificate_from_json("{}"));
}

TEST_CASE("a network is a function of itself and of an invertible image of itself") {
  const auto a = random_network<double>({2, 4, 2}, 1.0, 5);
  const auto same = mappability_radii(a, a, Eigen::Vector2d::Zero(), 1.0, 1e-2);
  CHECK(same.first.at_cap);
  CHECK(same.second.at_cap);
  auto layers = a.layers();
  Eigen::Matrix2d m;
  m << 2, 1, -1, 1;
  layers.back().weight = (m * layers.back().weight).eval();
  layers.back().bias = (m * layers.back().bias + Eigen::Vector2d(0.3, -0.1)).eval();
  const ReluMlp b(layers);
  const auto affine = mappability_radii(a, b, Eigen::Vector2d::Zero(), 1.0, 1e-2);
  CHECK(affine.first.at_cap);
  CHECK(affine.second.at_cap);
}

TEST_CASE("an invertibility certificate settles small mappability probes by composition") {
  const auto a = random_network<double>({2, 8, 8, 2}, std::nullopt, 5);
  const auto b = perturb_weights(prune_magnitude(a, 0.5, 1), 0.01, 2);
  const Eigen::Vector2d c(0.5, -0.5);
  const auto inv_a = largest_invertible_radius(a, c, 1.0, 1e-2);
  const double injective = injective_radius(inv_a);
  CHECK(injective <= inv_a.radius);
  const auto with = mappability_radius(a, b, c, 1.0, 1e-2, {}, &inv_a);
  const auto without = mappability_radius(a, b, c, 1.0, 1e-2);
  CHECK(std::abs(with.radius - without.radius) <= 2e-2);
  CHECK(with.radius >= injective - 1e-2);
  for (const auto& p : with.probes)
    if (p.by_composition) CHECK(p.r <= injective);
}

TEST_CASE("bad arguments are rejected") {
  CHECK_THROWS_AS(largest_invertible_radius(relu_net(), at(0), -1, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(largest_invertible_radius(relu_net(), at(0), 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(largest_invertible_radius(relu_net(), Eigen::Vector2d::Zero(), 1, 1e-3), DimensionError);
}
