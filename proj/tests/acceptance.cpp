// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// criteria by number.

#include "support/reference.hpp"

#include "invcert/bench.hpp"
#include "invcert/certify.hpp"
#include "invcert/dynamics.hpp"
#include "invcert/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace invcert;
namespace dyn = invcert::dynamics;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Probe logs gathered along the way, checked again by criterion 8.
std::vector<std::vector<Probe>> g_logs;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

long undetermined(const ReluMlp& net, const InputBox& box) {
  return static_cast<long>(propagate_interval(net, box).undetermined_units());
}

/// Largest radius from `r` down (halving) at which the enumeration fits.
template <typename Units>
double fit_radius(double r, Units units) {
  while (units(r) > 14) r /= 2;
  return r;
}

Outcome criterion1() {
  int instances = 0, agree = 0;
  double worst = 0;
  auto record = [&](double milp_value, milp::Status status, double oracle_value) {
    ++instances;
    const double diff = std::abs(milp_value - oracle_value);
    worst = std::max(worst, diff);
    if (status == milp::Status::Optimal && diff <= 1e-6) ++agree;
  };
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::vector<Eigen::Index> dims = seed % 2 ? std::vector<Eigen::Index>{1, 4, 3, 1}
                                                    : std::vector<Eigen::Index>{2, 5, 2};
    const auto net = random_network<double>(dims, 1.0, seed);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(dims.front(), 0.1 * static_cast<double>(seed % 3));
    for (auto kind : {ProblemKind::Invertibility, ProblemKind::PseudoInvertibility}) {
      const int copies = kind == ProblemKind::Invertibility ? 2 : 1;
      const double r = fit_radius(1.0, [&](double s) { return copies * undetermined(net, InputBox(c, s)); });
      const InputBox box(c, r);
      const auto problem = kind == ProblemKind::Invertibility ? encode_problem1(net, box) : encode_problem2(net, box);
      const auto sol = milp::milp_solve(problem.model);
      record(sol.objective, sol.status, oracle::pattern_enumeration_optimum(net, box, kind).optimum);
    }
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = random_network<double>({2, 6, 2}, 1.0, seed);
    const auto b = seed % 2 ? prune_magnitude(a, 0.5, seed) : random_network<double>({2, 4, 2}, 1.0, seed + 100);
    const Eigen::Vector2d c(0.2, -0.1);
    const double r = fit_radius(1.0, [&](double s) {
      const InputBox box(c, s);
      return 2 * (undetermined(a, box) + undetermined(b, box));
    });
    const InputBox box(c, r);
    const auto sol = milp::milp_solve(encode_problem3(a, b, box).model);
    record(sol.objective, sol.status, oracle::pattern_enumeration_mappability(a, b, box).optimum);
  }
  return {instances >= 30 && agree == instances,
          std::to_string(agree) + "/" + std::to_string(instances) + " instances agree, max |diff| " + fmt(worst)};
}

Outcome criterion2() {
  const double r_max = 2.0, eps_r = 5e-4, step = 1e-5;
  int instances = 0, ok_r = 0, ok_order = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto net = random_network<double>({1, 10, 10, 1}, std::nullopt, seed);
    for (double c : {-1.8, -1.0, -0.3}) {
      const Eigen::VectorXd center = Eigen::VectorXd::Constant(1, c);
      const auto inv = largest_invertible_radius(net, center, r_max, eps_r);
      const auto pseudo = largest_pseudo_radius(net, center, r_max, eps_r);
      g_logs.push_back(inv.probes);
      g_logs.push_back(pseudo.probes);
      const double scan = oracle::scan_invertible_radius_1d(net, c, r_max, step);
      const double err = std::abs(inv.radius - scan);
      worst = std::max(worst, err);
      ++instances;
      ok_r += err <= std::max(eps_r, 1e-3) ? 1 : 0;
      ok_order += pseudo.radius >= inv.radius ? 1 : 0;
    }
  }
  return {instances >= 30 && ok_r == instances && ok_order == instances,
          std::to_string(ok_r) + "/" + std::to_string(instances) + " radii within 1e-3 of the scan (max err " +
              fmt(worst) + "), R >= r on " + std::to_string(ok_order)};
}

Outcome criterion3() {
  struct Row {
    double xn, xn1, yn1, tau1, tau2, yn_1, yn_2;
  };
  const std::vector<Row> real_rows{{4.88766, 1.62663, 2.27734, 0.27018, 0.12996, 0.06670, -0.47845},
                                   {2.36082, 3.27177, 2.13372, -1.51470, 0.07929, 0.98342, 3.15257},
                                   {2.19914, 1.97336, 3.22943, -1.51394, -0.02572, 1.18823, 2.97282}};
  int matched = 0;
  for (const auto& row : real_rows) {
    const auto comps = dyn::history_complete({10, Eigen::Vector3d(row.xn, row.xn1, row.yn1), 1, 2});
    int hits = 0;
    for (const auto& [tau, yn] : {std::pair{row.tau1, row.yn_1}, std::pair{row.tau2, row.yn_2}})
      for (const auto& c : comps)
        if (c.real && std::abs(c.value(dyn::Quantity::Tau) - tau) <= 1e-4 &&
            std::abs(c.value(dyn::Quantity::Yn) - yn) <= 1e-4)
          ++hits;
    matched += comps.size() == 2 && hits == 2 ? 1 : 0;
  }
  const auto complex_row = dyn::history_complete({10, Eigen::Vector3d(4.60127, 2.27780, 2.21088), 1, 2});
  bool complex_ok = complex_row.size() == 2;
  for (const auto& c : complex_row) {
    const auto tau = c.complex_value(dyn::Quantity::Tau), yn = c.complex_value(dyn::Quantity::Yn);
    complex_ok = complex_ok && !c.real && std::abs(tau.real() - 0.09960) <= 1e-4 &&
                 std::abs(std::abs(tau.imag()) - 0.14337) <= 1e-4 && std::abs(yn.real() - 0.24609) <= 1e-4 &&
                 std::abs(std::abs(yn.imag()) - 0.51630) <= 1e-4;
  }
  return {matched == 3 && complex_ok,
          std::to_string(matched) + "/3 real rows reproduced, complex row " + (complex_ok ? "flagged" : "NOT flagged")};
}

Outcome criterion4() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 5);
  int recovered = 0;
  const dyn::BrusselatorEuler base{1, 2, 0.15};
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector2d p(u(rng), u(rng));
    const auto target = dyn::brusselator_step(base, p);
    for (const auto& q : dyn::brusselator_preimages(base, target))
      if ((q - p).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, p.cwiseAbs().maxCoeff())) {
        ++recovered;
        break;
      }
  }
  int attractor_points = 0, three = 0;
  for (double b : {1.95, 2.1}) {
    const dyn::BrusselatorEuler m{1, b, 0.15};
    Eigen::Vector2d p(1.5, 1.5);
    for (int k = 0; k < 5000; ++k) p = dyn::brusselator_step(m, p);
    for (int k = 0; k < 100; ++k) {
      p = dyn::brusselator_step(m, p);
      ++attractor_points;
      three += dyn::brusselator_preimages(m, p).size() == 3 ? 1 : 0;
    }
  }
  return {recovered == 1000 && three == attractor_points,
          std::to_string(recovered) + "/1000 sources recovered, " + std::to_string(three) + "/" +
              std::to_string(attractor_points) + " attractor points with 3 real preimages"};
}

Outcome criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst = 0;
  int nets = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<ReluMlp> blocks;
    for (std::uint64_t k = 0; k < 3; ++k)
      blocks.push_back(random_network<double>({2, 6 + static_cast<Eigen::Index>(k), 5, 2}, std::nullopt, 10 * seed + k));
    const ResidualNet rnet(blocks);
    const auto flat = flatten_residual(rnet);
    ++nets;
    for (int k = 0; k < 1000; ++k) {
      const std::vector<double> x{u(rng), u(rng)};
      const auto expected = reference::forward(rnet, x);
      const auto got = reference::to_std(forward(flat, Eigen::Vector2d(x[0], x[1])));
      worst = std::max(worst, reference::max_abs_diff(expected, got));
    }
  }
  return {worst <= 1e-9, std::to_string(nets) + " residual nets x 1000 inputs, max |f_res - f_flat| " + fmt(worst)};
}

Outcome criterion6() {
  const auto block = make_contractive(random_network<double>({2, 4, 2}, std::nullopt, 1), 0.5);
  const auto flat = flatten_residual(ResidualNet({block}));
  const auto cert = largest_invertible_radius(flat, Eigen::Vector2d::Zero(), 1e6, 1e-3);
  return {cert.at_cap && cert.radius == 1e6,
          std::string("contractive residual net at r_max = 1e6: ") + (cert.at_cap ? "at-cap" : "radius " + fmt(cert.radius))};
}

Outcome criterion7() {
  const auto a = random_network<double>({2, 32, 32, 2}, std::nullopt, 11);
  const Eigen::Vector2d center(1.0, 0.5);
  const double r_max = 0.2, eps_r = r_max / 64;
  const auto inv_a = largest_invertible_radius(a, center, r_max, eps_r);
  g_logs.push_back(inv_a.probes);
  double lo = milp::kInf, hi = -milp::kInf;
  std::string radii;
  for (double s : {0.4, 0.5, 0.6})
    for (std::uint64_t v = 1; v <= 3; ++v) {
      const auto b = perturb_weights(prune_magnitude(a, s, 1), 0.01, v);
      const auto ab = mappability_radius(a, b, center, r_max, eps_r, {}, &inv_a);
      g_logs.push_back(ab.probes);
      lo = std::min(lo, ab.radius);
      hi = std::max(hi, ab.radius);
      radii += (radii.empty() ? "" : " ") + fmt(ab.radius);
    }
  return {hi - lo <= 2 * eps_r, "r_A " + fmt(inv_a.radius) + ", r_AB over 9 variants: " + radii + " (spread " +
                                    fmt(hi - lo) + ", allowed " + fmt(2 * eps_r) + ")"};
}

Outcome criterion8() {
  // exact-mode logs, where every probe carries p*
  CertifyOptions exact;
  exact.exact = true;
  int exact_logs = 0, monotone = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto net = random_network<double>({1, 10, 10, 1}, std::nullopt, seed);
    for (double c : {-1.0, -0.3}) {
      const Eigen::VectorXd center = Eigen::VectorXd::Constant(1, c);
      for (const auto& log : {largest_invertible_radius(net, center, 2.0, 1e-3, exact).probes,
                              largest_pseudo_radius(net, center, 2.0, 1e-3, exact).probes}) {
        ++exact_logs;
        monotone += probe_log_monotone(log, 1e-6) ? 1 : 0;
      }
    }
  }
  int decision_logs = 0, decision_ok = 0;
  for (const auto& log : g_logs) {
    ++decision_logs;
    decision_ok += probe_log_monotone(log, 1e-5) ? 1 : 0;
  }

  long violations = 0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto net = random_network<double>({2, 16, 16, 2}, std::nullopt, 8);
  const InputBox box(Eigen::Vector2d(0.3, -0.4), 0.8);
  const auto bounds = propagate_interval(net, box);
  for (int k = 0; k < 100000; ++k) {
    const Eigen::Vector2d x = box.center + box.radius * Eigen::Vector2d(u(rng), u(rng));
    const auto trace = forward_trace(net, x);
    for (std::size_t l = 0; l < bounds.layers(); ++l)
      violations += ((trace.pre_activations[l].array() < bounds.lower[l].array()) ||
                     (trace.pre_activations[l].array() > bounds.upper[l].array()))
                        .count();
  }

  std::vector<std::size_t> counts;
  const dyn::Rect near_attractor{0, 3, 0, 4.5};
  for (double tau : {0.15, 0.05, 0.01})
    counts.push_back(dyn::j0_grid(dyn::brusselator_map({1, 2.1, tau}), near_attractor, 201, 201).flagged.size());
  const bool j0_ok = counts[0] >= counts[1] && counts[1] >= counts[2];

  return {monotone == exact_logs && decision_ok == decision_logs && violations == 0 && j0_ok,
          std::to_string(monotone) + "/" + std::to_string(exact_logs) + " exact logs and " +
              std::to_string(decision_ok) + "/" + std::to_string(decision_logs) +
              " decision logs monotone; IBP violations in 1e5 samples: " + std::to_string(violations) +
              "; J0 cells for tau 0.15/0.05/0.01: " + std::to_string(counts[0]) + "/" + std::to_string(counts[1]) +
              "/" + std::to_string(counts[2])};
}

Outcome criterion9() {
  const auto net = random_network<double>({1, 10, 10, 1}, std::nullopt, 1);
  const InputBox box(Eigen::VectorXd::Zero(1), 100.0);
  const long units = undetermined(net, box);
  const int binaries = encode_problem1(net, box).model.num_binaries();
  return {units == 20 && binaries == 42,
          std::to_string(units) + "/20 units undetermined, " + std::to_string(binaries) + " binaries (expected 42)"};
}

Outcome criterion10() {
  BenchConfig config;
  config.inputs = {1, 2, 3};
  config.hidden = {4, 8, 16};
  config.radii = {0.5};
  config.repeats = 3;
  config.time_limit_seconds = 30;
  const auto rows = run_bench(config);
  bool grows = rows.size() == 9;
  for (std::size_t i = 0; i < 3 && grows; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& r = rows[3 * i + j];
      if (j > 0) grows = grows && r.variables > rows[3 * i + j - 1].variables;
      if (i > 0) grows = grows && r.variables > rows[3 * (i - 1) + j].variables;
    }
  std::string sizes;
  for (const auto& r : rows) sizes += (sizes.empty() ? "" : " ") + std::to_string(r.variables);
  return {grows, std::to_string(rows.size()) + " cells, variables " + sizes};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"MILP-vs-oracle equivalence", criterion1},   {"1D certification accuracy", criterion2},
      {"history completion table", criterion3},     {"Brusselator preimages", criterion4},
      {"residual flattening", criterion5},          {"invertible-by-construction sanity", criterion6},
      {"pruning r_AB consistency", criterion7},     {"monotonicity suites", criterion8},
      {"binary-count law", criterion9},             {"benchmark harness", criterion10}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s: %s; %s (%.1f s)\n", id, outcome.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
