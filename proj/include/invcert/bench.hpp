// Timing sweep of the invertibility MILP over single-hidden-layer networks
// n0 -> n1 -> n0, reporting model sizes and median solve times.
#pragma once

#include "invcert/milp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace invcert {

struct BenchConfig {
  std::vector<int> inputs{1, 2};
  std::vector<int> hidden{4, 8, 16};
  std::vector<double> radii{0.1};
  int repeats = 3;
  double time_limit_seconds = 10;
  std::uint64_t seed = 1;
};

struct BenchRow {
  int inputs = 0;
  int hidden = 0;
  double radius = 0;
  int variables = 0;
  int constraints = 0;
  int binaries = 0;
  double median_seconds = 0;
  long median_nodes = 0;
  /// Status of the median run.
  milp::Status status = milp::Status::Optimal;
};

/// One row per (n0, n1, r), in that nesting order. Each repeat draws a new
/// network from the seed sequence; the model size is that of the first.
std::vector<BenchRow> run_bench(const BenchConfig& config);

std::string bench_to_csv(const std::vector<BenchRow>& rows);

}  // namespace invcert
