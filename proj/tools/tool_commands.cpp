#include "cli.hpp"
#include "svg.hpp"

#include "invcert/bench.hpp"
#include "invcert/network_io.hpp"
#include "invcert/oracle.hpp"
#include "json.hpp"

#include <fstream>
#include <memory>
#include <sstream>

namespace invcert::cli {
namespace {

using json = nlohmann::json;

struct CheckRow {
  std::string instance;
  double radius = 0;
  double milp = 0;
  double oracle = 0;
  double tol = 0;
  std::string status;
  bool agree = false;
};

/// Halves r until the enumeration fits under its unit cap.
template <typename Count>
double fit_radius(double r, Count units) {
  for (int k = 0; k < 30 && units(r) > 14; ++k) r /= 2;
  return r;
}

long undetermined(const ReluMlp& net, const InputBox& box) {
  return static_cast<long>(propagate_interval(net, box).undetermined_units());
}

CheckRow check_enumeration(const std::string& name, const ReluMlp& net, Eigen::VectorXd center, double r,
                           ProblemKind kind) {
  const int copies = kind == ProblemKind::Invertibility ? 2 : 1;
  r = fit_radius(r, [&](double s) { return copies * undetermined(net, InputBox(center, s)); });
  const InputBox box(center, r);
  const auto problem = kind == ProblemKind::Invertibility ? encode_problem1(net, box) : encode_problem2(net, box);
  const auto sol = milp::milp_solve(problem.model);
  const auto ref = oracle::pattern_enumeration_optimum(net, box, kind);
  CheckRow row{name, r, sol.objective, ref.optimum, 1e-6, std::string(milp::to_string(sol.status))};
  row.agree = sol.status == milp::Status::Optimal && std::abs(sol.objective - ref.optimum) <= row.tol;
  return row;
}

CheckRow check_mappability(const std::string& name, const ReluMlp& a, const ReluMlp& b, Eigen::VectorXd center,
                           double r) {
  r = fit_radius(r, [&](double s) {
    const InputBox box(center, s);
    return 2 * (undetermined(a, box) + undetermined(b, box));
  });
  const InputBox box(center, r);
  const auto sol = milp::milp_solve(encode_problem3(a, b, box).model);
  const auto ref = oracle::pattern_enumeration_mappability(a, b, box);
  CheckRow row{name, r, sol.objective, ref.optimum, 1e-6, std::string(milp::to_string(sol.status))};
  row.agree = sol.status == milp::Status::Optimal && std::abs(sol.objective - ref.optimum) <= row.tol;
  return row;
}

CheckRow check_grid(const std::string& name, const ReluMlp& net, double r) {
  const int resolution = 4000;
  const InputBox box(Eigen::VectorXd::Zero(1), r);
  const auto sol = milp::milp_solve(encode_problem1(net, box).model);
  const auto ref = oracle::grid_collision_search(net, box, resolution);
  CheckRow row{name, r, sol.objective, ref.gap, 2 * r / (resolution / 2), std::string(milp::to_string(sol.status))};
  row.agree = sol.status == milp::Status::Optimal && std::abs(sol.objective - ref.gap) <= row.tol;
  return row;
}

CheckRow check_radius(const std::string& name, const ReluMlp& net, double center, double r_max, double eps_r) {
  const auto cert = largest_invertible_radius(net, Eigen::VectorXd::Constant(1, center), r_max, eps_r);
  const double ref = oracle::scan_invertible_radius_1d(net, center, r_max);
  CheckRow row{name, r_max, cert.radius, ref, std::max(eps_r, 1e-3), cert.at_cap ? "at-cap" : "bounded"};
  row.agree = std::abs(cert.radius - ref) <= row.tol;
  return row;
}

const std::vector<std::string> kInstances{"p1-1-4-1", "p2-1-4-1", "p1-2-4-2", "p2-2-4-2",
                                          "p3-2-6-2", "grid-1-4-1", "radius-1-10-10-1"};

CheckRow run_instance(const std::string& name, std::uint64_t seed) {
  const Eigen::VectorXd c1 = Eigen::VectorXd::Zero(1), c2 = Eigen::VectorXd::Zero(2);
  if (name == "p1-1-4-1") return check_enumeration(name, random_network<double>({1, 4, 1}, 1.0, seed), c1, 1.0,
                                                   ProblemKind::Invertibility);
  if (name == "p2-1-4-1") return check_enumeration(name, random_network<double>({1, 4, 1}, 1.0, seed), c1, 1.0,
                                                   ProblemKind::PseudoInvertibility);
  if (name == "p1-2-4-2") return check_enumeration(name, random_network<double>({2, 4, 2}, 1.0, seed), c2, 0.5,
                                                   ProblemKind::Invertibility);
  if (name == "p2-2-4-2") return check_enumeration(name, random_network<double>({2, 4, 2}, 1.0, seed), c2, 0.5,
                                                   ProblemKind::PseudoInvertibility);
  if (name == "p3-2-6-2") {
    const auto a = random_network<double>({2, 6, 2}, 1.0, seed);
    return check_mappability(name, a, prune_magnitude(a, 0.5, seed), c2, 0.5);
  }
  if (name == "grid-1-4-1") return check_grid(name, random_network<double>({1, 4, 1}, 1.0, seed), 1.0);
  if (name == "radius-1-10-10-1")
    return check_radius(name, random_network<double>({1, 10, 10, 1}, std::nullopt, seed), 0.0, 2.0, 1e-3);
  throw UsageError("unknown instance '" + name + "'");
}

void add_oracle_check(Registry& reg) {
  auto instance = std::make_shared<std::string>("all");
  auto* sub = reg.app().add_subcommand("oracle-check", "Compare solver results with brute-force oracles");
  std::vector<std::string> names = kInstances;
  names.push_back("all");
  sub->add_option("--instance", *instance, "Named instance or all")->check(CLI::IsMember(names));
  reg.add(sub, [instance, &reg] {
    const auto names = *instance == "all" ? kInstances : std::vector<std::string>{*instance};
    json rows = json::array();
    int failures = 0;
    for (const auto& name : names) {
      const auto row = run_instance(name, reg.globals().seed);
      failures += row.agree ? 0 : 1;
      rows.push_back({{"instance", row.instance}, {"radius", row.radius}, {"solver", row.milp},
                      {"oracle", row.oracle}, {"tolerance", row.tol}, {"status", row.status}, {"agree", row.agree}});
    }
    emit(reg.globals(), rows.dump(2));
    if (failures > 0) throw CheckFailed(std::to_string(failures) + " instance(s) disagree with the oracle");
  });
}

void add_bench(Registry& reg) {
  struct Flags {
    std::string inputs = "1,2", hidden = "4,8,16", radii = "0.1,0.5";
    int repeats = 3;
    double time_limit = 10;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("bench", "Timing sweep of the invertibility program over n0-n1-n0 networks");
  sub->add_option("--inputs", f->inputs, "Input widths n0");
  sub->add_option("--hidden", f->hidden, "Hidden widths n1");
  sub->add_option("--radii", f->radii, "Ball radii");
  sub->add_option("--repeats", f->repeats, "Runs per cell (median reported)")->check(CLI::PositiveNumber);
  sub->add_option("--time-limit", f->time_limit, "Seconds per run")->check(CLI::PositiveNumber);
  reg.add(sub, [f, &reg] {
    BenchConfig config;
    config.inputs = parse_int_list(f->inputs, "--inputs");
    config.hidden = parse_int_list(f->hidden, "--hidden");
    config.radii = parse_list(f->radii, "--radii");
    config.repeats = f->repeats;
    config.time_limit_seconds = f->time_limit;
    config.seed = reg.globals().seed;
    emit(reg.globals(), bench_to_csv(run_bench(config)));
  });
}

void add_dump_lp(Registry& reg) {
  struct Flags {
    std::string net, net_b, center, norm = "linf";
    double radius = 1;
    int problem = 1;
    bool shared = false;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("dump-lp", "Write the encoded program in LP text format");
  sub->add_option("--net", f->net, "Network JSON (network A for problem 3)")->required()->check(CLI::ExistingFile);
  sub->add_option("--net-b", f->net_b, "Network B for problem 3")->check(CLI::ExistingFile);
  sub->add_option("--center", f->center, "Ball center")->required();
  sub->add_option("--radius", f->radius, "Ball radius")->check(CLI::NonNegativeNumber);
  sub->add_option("--problem", f->problem, "1 invertibility, 2 pseudo-invertibility, 3 mappability")
      ->check(CLI::Range(1, 3));
  sub->add_option("--norm", f->norm, "Ball norm")->check(CLI::IsMember({"linf", "l1"}));
  sub->add_flag("--shared-binaries", f->shared, "Problem 1 with one binary set for both copies");
  reg.add(sub, [f, &reg] {
    const auto net = load_mlp_file(f->net);
    const InputBox box(parse_vector(f->center, "--center"), f->radius, parse_norm(f->norm));
    if (f->shared && f->problem != 1) throw UsageError("--shared-binaries applies to problem 1");
    EncodedProblem problem;
    if (f->problem == 1) {
      problem = encode_problem1(net, box, {f->shared});
    } else if (f->problem == 2) {
      problem = encode_problem2(net, box);
    } else {
      if (f->net_b.empty()) throw UsageError("problem 3 needs --net-b");
      problem = encode_problem3(net, load_mlp_file(f->net_b), box);
    }
    emit(reg.globals(), milp::to_lp_format(problem.model));
  });
}

void add_plot(Registry& reg) {
  struct Flags {
    std::string csv, x, y, mode = "scatter";
    PlotStyle style;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = reg.app().add_subcommand("plot", "CSV columns to an SVG scatter or line plot");
  sub->add_option("--csv", f->csv, "Input CSV with a header row")->required()->check(CLI::ExistingFile);
  sub->add_option("--x", f->x, "x column (default: first)");
  sub->add_option("--y", f->y, "y columns, comma-separated (default: second)");
  sub->add_option("--mode", f->mode, "scatter or line")->check(CLI::IsMember({"scatter", "line"}));
  sub->add_option("--title", f->style.title, "Plot title");
  sub->add_option("--width", f->style.width, "Pixels")->check(CLI::Range(100, 10000));
  sub->add_option("--height", f->style.height, "Pixels")->check(CLI::Range(100, 10000));
  reg.add(sub, [f, &reg] {
    std::ifstream file(f->csv);
    std::stringstream text;
    text << file.rdbuf();
    const auto table = parse_csv(text.str());
    if (table.header.size() < 2 && (f->x.empty() || f->y.empty())) throw UsageError("CSV needs two columns");
    const std::string x = f->x.empty() ? table.header[0] : f->x;
    std::vector<std::string> ys;
    if (f->y.empty()) {
      ys.push_back(table.header[1]);
    } else {
      std::stringstream in(f->y);
      for (std::string name; std::getline(in, name, ',');) ys.push_back(name);
    }
    std::vector<Series> series;
    for (const auto& y : ys) series.push_back({ys.size() > 1 ? y : "", table.column(x), table.column(y)});
    auto style = f->style;
    style.lines = f->mode == "line";
    style.x_label = x;
    style.y_label = ys.size() == 1 ? ys[0] : "";
    emit(reg.globals(), svg_plot(series, style));
  });
}

}  // namespace

void register_tool_commands(Registry& registry) {
  add_oracle_check(registry);
  add_bench(registry);
  add_dump_lp(registry);
  add_plot(registry);
}

}  // namespace invcert::cli
