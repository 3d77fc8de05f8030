#include "doctest.h"
#include "support/reference.hpp"

#include "invcert/dynamics.hpp"
#include "invcert/oracle.hpp"

#include <random>
#include <set>

using namespace invcert;
using namespace invcert::dynamics;

TEST_CASE("polynomial roots of a cubic with known roots") {
  // (x - 1)(x + 2)(x - 3) = x^3 - 2x^2 - 5x + 6
  const auto roots = polynomial_roots({1, -2, -5, 6});
  REQUIRE(roots.size() == 3);
  std::vector<double> re;
  for (auto z : roots) {
    CHECK(is_real_root(z));
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-2).epsilon(1e-12));
  CHECK(re[1] == doctest::Approx(1).epsilon(1e-12));
  CHECK(re[2] == doctest::Approx(3).epsilon(1e-12));
  const auto complex_pair = polynomial_roots({1, 0, 1});
  CHECK_FALSE(is_real_root(complex_pair[0]));
  CHECK(polynomial_roots({0, 2, -4}).size() == 1);
  CHECK_THROWS_AS(polynomial_roots({0, 0}), std::invalid_argument);
}

TEST_CASE("stable quadratic formula keeps the small root accurate") {
  const auto r = quadratic_roots(1, -1e8, 1);
  const double small = std::min(std::abs(r[0].real()), std::abs(r[1].real()));
  CHECK(small == doctest::Approx(1e-8).epsilon(1e-12));
}

TEST_CASE("Brusselator step and Jacobian") {
  const BrusselatorEuler m{1, 2, 0.15};
  const auto ref = reference::brusselator(1, 2, 0.15, 1.3, 0.7);
  const auto step = brusselator_step(m, {1.3, 0.7});
  CHECK(step(0) == doctest::Approx(ref[0]).epsilon(1e-15));
  CHECK(step(1) == doctest::Approx(ref[1]).epsilon(1e-15));
  const auto fd = oracle::fd_jacobian(
      [&](const Eigen::VectorXd& p) -> Eigen::VectorXd { return brusselator_step(m, {p(0), p(1)}); },
      Eigen::Vector2d(1, 1), 1e-5);
  CHECK((fd - brusselator_jacobian(m, {1, 1})).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Brusselator preimages map back onto the target") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 4);
  for (double b : {1.95, 2.1}) {
    const BrusselatorEuler m{1, b, 0.15};
    for (int k = 0; k < 200; ++k) {
      const Eigen::Vector2d source(u(rng), u(rng));
      const auto target = brusselator_step(m, source);
      const auto pre = brusselator_preimages(m, target);
      bool found = false;
      for (const auto& p : pre) {
        CHECK((brusselator_step(m, p) - target).cwiseAbs().maxCoeff() < 1e-9 * (1 + target.norm()));
        found = found || (p - source).cwiseAbs().maxCoeff() < 1e-9 * (1 + source.norm());
      }
      CHECK(found);
    }
  }
  CHECK_THROWS_AS(brusselator_preimages({1, 2, 1.0}, {1, 1}), std::domain_error);
}

TEST_CASE("scalar preimage count follows the discriminant sign") {
  const ScalarQuadraticEuler m{0, 0, 0.5};
  // discriminant 1 + 2 x'
  CHECK(scalar_discriminant(m, -0.5) == 0.0);
  CHECK(scalar_preimages(m, -0.5).size() == 1);
  CHECK(scalar_preimages(m, -0.6).empty());
  const auto two = scalar_preimages(m, 1.0);
  REQUIRE(two.size() == 2);
  CHECK(two[0] < two[1]);
  for (double x : two) CHECK(scalar_step(m, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(scalar_step(m, scalar_preimages(m, -0.5)[0]) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("every history case recovers the true step") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.4, 3), uy(0.3, 3), ut(0.05, 0.4);
  const double a = 1, b = 2;
  for (int trial = 0; trial < 30; ++trial) {
    const double x = ux(rng), y = uy(rng), tau = ut(rng);
    const auto next = reference::brusselator(a, b, tau, x, y);
    const std::array<double, 5> truth{x, y, next[0], next[1], tau};
    for (int c = 1; c <= 10; ++c) {
      const auto given = history_given(c);
      Eigen::Vector3d values;
      for (int k = 0; k < 3; ++k) values(k) = truth[static_cast<std::size_t>(given[static_cast<std::size_t>(k)])];
      std::vector<Completion> completions;
      try {
        completions = history_complete({c, values, a, b});
      } catch (const DegenerateCase&) {
        continue;
      }
      bool found = false;
      for (const auto& comp : completions) {
        if (!comp.real) continue;
        CHECK(comp.residual < 1e-9 * (1 + std::abs(comp.value(Quantity::Xn)) + std::abs(comp.value(Quantity::Yn))));
        bool match = true;
        for (int q = 0; q < 5; ++q)
          match = match && std::abs(comp.values[static_cast<std::size_t>(q)].real() - truth[static_cast<std::size_t>(q)]) <
                               1e-7 * (1 + std::abs(truth[static_cast<std::size_t>(q)]));
        found = found || match;
      }
      CHECK_MESSAGE(found, "case " << c);
    }
  }
  CHECK_THROWS_AS(history_given(11), std::invalid_argument);
}

TEST_CASE("degenerate history inputs are reported") {
  CHECK_THROWS_AS(history_complete({10, Eigen::Vector3d(0, 1, 1), 1, 2}), DegenerateCase);
  CHECK_THROWS_AS(history_complete({2, Eigen::Vector3d(1, 1, 1), 1, 2}), DegenerateCase);
}

TEST_CASE("J0 cells on the Brusselator refine consistently") {
  const auto map = brusselator_map({1, 2, 0.15});
  const Rect region{0, 4, 0, 4};
  const auto coarse = j0_grid(map, region, 41, 41);
  const auto fine = j0_grid(map, region, 81, 81);
  REQUIRE_FALSE(coarse.flagged.empty());
  std::set<std::pair<int, int>> near;
  for (const auto& [i, j] : coarse.flagged)
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) near.insert({i + di, j + dj});
  for (const auto& [i, j] : fine.flagged) CHECK(near.count({i / 2, j / 2}) == 1);
  CHECK(j0_grid(linear_map(Eigen::Matrix2d::Identity()), region, 5, 5).flagged.empty());
  CHECK_THROWS_AS(j0_grid(map, region, 1, 5), std::invalid_argument);
}

TEST_CASE("RK4 Van der Pol flow converges at fourth order") {
  const Eigen::Vector2d x0(1.5, -0.5);
  const auto exact = vdp_flow(x0, 1.0, 2.0, 4096);
  const double e1 = (vdp_flow(x0, 1.0, 2.0, 20) - exact).norm();
  const double e2 = (vdp_flow(x0, 1.0, 2.0, 40) - exact).norm();
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.7);
  CHECK(order < 4.3);
}

TEST_CASE("datasets and bi-Lipschitz estimates") {
  const Map identity = [](const Eigen::VectorXd& x) { return x; };
  const auto est = bilipschitz_estimate(identity, {0, 1, 0, 1}, 50, 1);
  CHECK(est.upper == doctest::Approx(1.0));
  CHECK(est.lower == doctest::Approx(1.0));
  const Map stretch = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::Vector2d(2 * x(0), 0.5 * x(1)); };
  const auto s = bilipschitz_estimate(stretch, {-1, 1, -1, 1}, 400, 2);
  CHECK(s.upper <= 2.0 + 1e-12);
  CHECK(s.upper > 1.99);
  CHECK(s.lower >= 0.5 - 1e-12);
  CHECK(s.lower < 0.51);
  const auto data = generate_dataset(identity, {2, 3, -1, 0}, 10, 4);
  for (const auto& d : data) CHECK((d.input(0) >= 2 && d.input(0) <= 3 && d.input(1) >= -1 && d.input(1) <= 0));
  CHECK(dataset_to_csv(data).rfind("x1,y1,x2,y2\n", 0) == 0);
  CHECK(generate_dataset(identity, {0, 1, 0, 1}, 3, 9)[2].input == generate_dataset(identity, {0, 1, 0, 1}, 3, 9)[2].input);
}
