#include "doctest.h"

#include "invcert/encoder.hpp"

using namespace invcert;

namespace {

const Eigen::VectorXd kOrigin1 = Eigen::VectorXd::Zero(1);
const Eigen::VectorXd kOrigin2 = Eigen::VectorXd::Zero(2);

double linf(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace

TEST_CASE("problem 1 has two binaries per input coordinate and per undetermined unit and copy") {
  const auto net = random_network<double>({1, 10, 10, 1}, std::nullopt, 1);
  const InputBox box(kOrigin1, 100.0);
  REQUIRE(propagate_interval(net, box).undetermined_units() == 20);
  const auto problem = encode_problem1(net, box);
  problem.model.validate();
  CHECK(problem.model.num_binaries() == 42);
  CHECK(problem.indicator_pos.size() == 1);
  CHECK(problem.indicator_neg.size() == 1);
  CHECK(problem.big_m == doctest::Approx(400.0));
  CHECK(encode_problem1(net, box, {true}).model.num_binaries() == 22);
}

TEST_CASE("units fixed by their bounds get no binary") {
  const auto net = random_network<double>({2, 8, 2}, std::nullopt, 4);
  const InputBox box(Eigen::Vector2d(0.3, 0.1), 1e-3);
  const long undetermined = propagate_interval(net, box).undetermined_units();
  const auto problem = encode_problem1(net, box);
  CHECK(problem.model.num_binaries() == 2 * 2 + 2 * undetermined);
  for (const auto& copy : problem.copies)
    for (const auto& layer : copy.binary)
      CHECK(std::count_if(layer.begin(), layer.end(), [](int b) { return b >= 0; }) == undetermined);
}

TEST_CASE("problem 1 optimum decodes to a replayable collision") {
  const auto net = random_network<double>({2, 6, 2}, 1.0, 3);
  const InputBox box(kOrigin2, 1.0);
  const auto problem = encode_problem1(net, box);
  const auto sol = milp::milp_solve(problem.model);
  REQUIRE(sol.status == milp::Status::Optimal);
  const auto [x, y] = problem.decode(sol.values);
  CHECK(box.contains(x, 1e-9));
  CHECK(box.contains(y, 1e-9));
  CHECK(linf(forward(net, x) - forward(net, y)) < 1e-7);
  CHECK(linf(x - y) == doctest::Approx(sol.objective).epsilon(1e-6));
}

TEST_CASE("problem 1 under the L1 ball measures the L1 distance") {
  const auto net = random_network<double>({2, 6, 2}, 1.0, 3);
  const InputBox box(kOrigin2, 1.0, Norm::L1);
  const auto problem = encode_problem1(net, box);
  const auto sol = milp::milp_solve(problem.model);
  REQUIRE(sol.status == milp::Status::Optimal);
  const auto [x, y] = problem.decode(sol.values);
  CHECK(box.contains(x, 1e-9));
  CHECK(box.contains(y, 1e-9));
  CHECK(linf(forward(net, x) - forward(net, y)) < 1e-7);
  CHECK((x - y).lpNorm<1>() == doctest::Approx(sol.objective).epsilon(1e-6));
}

TEST_CASE("an injective network has only the trivial solution") {
  ReluMlp net({{Eigen::Matrix2d::Identity(), Eigen::Vector2d(5, 5)},
               {Eigen::Matrix2d(Eigen::Vector2d(2, -1).asDiagonal()), Eigen::Vector2d::Zero()}});
  const auto sol = milp::milp_solve(encode_problem1(net, InputBox(kOrigin2, 1.0)).model);
  REQUIRE(sol.status == milp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("problem 2 finds another preimage of the center's image") {
  // f(x) = |x| around 0.5: the mirror point -0.5 lies in a ball of radius 1.
  ReluMlp net({{(Eigen::MatrixXd(2, 1) << 1, -1).finished(), Eigen::Vector2d::Zero()},
               {(Eigen::MatrixXd(1, 2) << 1, 1).finished(), Eigen::VectorXd::Zero(1)}});
  const InputBox box(Eigen::VectorXd::Constant(1, 0.5), 1.0);
  const auto problem = encode_problem2(net, box);
  const auto sol = milp::milp_solve(problem.model);
  REQUIRE(sol.status == milp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  const auto [x, c] = problem.decode(sol.values);
  CHECK(x(0) == doctest::Approx(-0.5));
  CHECK(c(0) == doctest::Approx(0.5));
  CHECK(milp::milp_solve(encode_problem2(net, InputBox(Eigen::VectorXd::Constant(1, 0.5), 0.4)).model).objective ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("problem 3 separates outputs of the second network over collisions of the first") {
  const auto a = random_network<double>({2, 5, 2}, 1.0, 6);
  const auto b = random_network<double>({2, 5, 2}, 1.0, 7);
  const InputBox box(kOrigin2, 0.8);
  const auto problem = encode_problem3(a, b, box);
  CHECK(problem.copies.size() == 4);
  const auto sol = milp::milp_solve(problem.model);
  REQUIRE(sol.status == milp::Status::Optimal);
  const auto [x1, x2] = problem.decode(sol.values);
  CHECK(linf(forward(a, x1) - forward(a, x2)) < 1e-7);
  CHECK(linf(forward(b, x1) - forward(b, x2)) == doctest::Approx(sol.objective).epsilon(1e-6));
  CHECK(milp::milp_solve(encode_problem3(a, a, box).model).objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("encoders check dimensions") {
  const auto net = random_network<double>({2, 3, 2}, std::nullopt, 1);
  CHECK_THROWS_AS(encode_problem1(net, InputBox(kOrigin1, 1.0)), DimensionError);
  CHECK_THROWS_AS(encode_problem3(net, random_network<double>({1, 3, 2}, std::nullopt, 1), InputBox(kOrigin2, 1.0)),
                  DimensionError);
}
