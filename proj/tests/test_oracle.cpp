#include "doctest.h"

#include "invcert/certify.hpp"
#include "invcert/oracle.hpp"

using namespace invcert;

namespace {

Eigen::VectorXd at(double v) { return Eigen::VectorXd::Constant(1, v); }

ReluMlp relu_net() {
  return ReluMlp({{Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)},
                  {Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)}});
}

}  // namespace

TEST_CASE("grid collision search on closed-form maps") {
  const auto flat = oracle::grid_collision_search(relu_net(), InputBox(at(0), 1.0), 1000);
  CHECK(flat.gap == doctest::Approx(1.0));
  CHECK(std::max(flat.x(0), flat.y(0)) <= 1e-12);
  ReluMlp identity({{(Eigen::MatrixXd(2, 1) << 1, -1).finished(), Eigen::Vector2d::Zero()},
                    {(Eigen::MatrixXd(1, 2) << 1, -1).finished(), Eigen::VectorXd::Zero(1)}});
  CHECK(oracle::grid_collision_search(identity, InputBox(at(0), 1.0), 1000).gap == 0.0);
  CHECK_THROWS(oracle::grid_collision_search(random_network<double>({3, 2, 3}, std::nullopt, 1),
                                             InputBox(Eigen::VectorXd::Zero(3), 1.0), 10));
}

TEST_CASE("grid gap grows with nested resolutions and approaches the solver optimum") {
  const auto net = random_network<double>({1, 4, 1}, 1.0, 2);
  const InputBox box(at(0), 1.0);
  double previous = 0;
  for (int res : {50, 100, 200, 400, 800}) {
    const double gap = oracle::grid_collision_search(net, box, res).gap;
    CHECK(gap >= previous - 1e-12);
    previous = gap;
  }
  const auto sol = milp::milp_solve(encode_problem1(net, box).model);
  CHECK(std::abs(sol.objective - previous) <= 2 * (2.0 / 800));
}

TEST_CASE("pattern enumeration matches branch and bound") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto net = random_network<double>({1, 4, 1}, 1.0, seed);
    const InputBox box(at(0.1), 1.0);
    for (auto kind : {ProblemKind::Invertibility, ProblemKind::PseudoInvertibility}) {
      const auto problem = kind == ProblemKind::Invertibility ? encode_problem1(net, box) : encode_problem2(net, box);
      const auto sol = milp::milp_solve(problem.model);
      REQUIRE(sol.status == milp::Status::Optimal);
      CHECK(std::abs(sol.objective - oracle::pattern_enumeration_optimum(net, box, kind).optimum) <= 1e-6);
    }
  }
  const auto a = random_network<double>({2, 6, 2}, 1.0, 3);
  const auto b = prune_magnitude(a, 0.5, 1);
  const InputBox box(Eigen::Vector2d::Zero(), 0.1);
  const auto sol = milp::milp_solve(encode_problem3(a, b, box).model);
  CHECK(std::abs(sol.objective - oracle::pattern_enumeration_mappability(a, b, box).optimum) <= 1e-6);
}

TEST_CASE("enumeration refuses too many undetermined units") {
  const auto net = random_network<double>({1, 10, 10, 1}, std::nullopt, 1);
  CHECK_THROWS_AS(oracle::pattern_enumeration_optimum(net, InputBox(at(0), 100.0), ProblemKind::Invertibility),
                  oracle::EnumerationCapExceeded);
}

TEST_CASE("tableau LP oracle on a small problem") {
  oracle::DenseLp lp;
  lp.a = (Eigen::MatrixXd(2, 2) << 1, 2, 3, 1).finished();
  lp.rhs = Eigen::Vector2d(4, 6);
  lp.relation = {milp::Relation::LessEqual, milp::Relation::LessEqual};
  lp.cost = Eigen::Vector2d(1, 1);
  lp.lower = Eigen::Vector2d::Zero();
  lp.upper = Eigen::Vector2d::Constant(milp::kInf);
  const auto sol = oracle::tableau_lp_max(lp);
  REQUIRE(sol.status == milp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(2.8));
  lp.relation[0] = milp::Relation::GreaterEqual;
  lp.rhs(0) = 100;
  lp.upper = Eigen::Vector2d::Constant(1);
  CHECK(oracle::tableau_lp_max(lp).status == milp::Status::Infeasible);
}

TEST_CASE("finite differences are exact on linear maps") {
  const Eigen::Matrix2d a = (Eigen::Matrix2d() << 1, -2, 0.5, 3).finished();
  const auto fd = oracle::fd_jacobian([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; },
                                      Eigen::Vector2d(0.3, 0.7), 1e-5);
  CHECK((fd - a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("1D scans on the single ReLU") {
  CHECK(oracle::scan_invertible_radius_1d(relu_net(), 1.0, 5.0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(oracle::scan_pseudo_radius_1d(relu_net(), 1.0, 5.0) == doctest::Approx(5.0));
  CHECK(oracle::scan_pseudo_radius_1d(relu_net(), -0.5, 5.0) < 1e-4);
}
