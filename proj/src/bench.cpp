#include "invcert/bench.hpp"

#include "invcert/encoder.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace invcert {

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.repeats < 1) throw std::invalid_argument("bench needs at least one repeat");
  milp::MilpOptions options;
  options.time_limit_seconds = config.time_limit_seconds;

  std::vector<BenchRow> rows;
  std::uint64_t seed = config.seed;
  for (int n0 : config.inputs)
    for (int n1 : config.hidden)
      for (double r : config.radii) {
        if (n0 < 1 || n1 < 1) throw std::invalid_argument("bench widths must be positive");
        BenchRow row{n0, n1, r};
        std::vector<std::pair<double, std::pair<long, milp::Status>>> runs;
        for (int k = 0; k < config.repeats; ++k) {
          const auto net = random_network<double>({n0, n1, n0}, std::nullopt, seed++);
          const auto problem = encode_problem1(net, InputBox(Eigen::VectorXd::Zero(n0), r));
          if (k == 0) {
            row.variables = problem.model.num_variables();
            row.constraints = problem.model.num_constraints();
            row.binaries = problem.model.num_binaries();
          }
          const auto solution = milp::milp_solve(problem.model, options);
          runs.push_back({solution.stats.wall_seconds, {solution.stats.nodes, solution.status}});
        }
        std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        const auto& median = runs[runs.size() / 2];
        row.median_seconds = median.first;
        row.median_nodes = median.second.first;
        row.status = median.second.second;
        rows.push_back(row);
      }
  return rows;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out.precision(6);
  out << "n0,n1,radius,variables,constraints,binaries,median_seconds,median_nodes,status\n";
  for (const auto& r : rows)
    out << r.inputs << ',' << r.hidden << ',' << r.radius << ',' << r.variables << ',' << r.constraints << ','
        << r.binaries << ',' << r.median_seconds << ',' << r.median_nodes << ',' << milp::to_string(r.status) << '\n';
  return out.str();
}

}  // namespace invcert
