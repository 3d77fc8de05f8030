#include "doctest.h"

#include "invcert/bench.hpp"

using namespace invcert;

TEST_CASE("bench sweep reports one row per cell with growing models") {
  BenchConfig config;
  config.inputs = {1, 2};
  config.hidden = {3, 6};
  config.radii = {0.5};
  config.repeats = 3;
  const auto rows = run_bench(config);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].variables < rows[1].variables);
  CHECK(rows[0].variables < rows[2].variables);
  CHECK(rows[2].variables < rows[3].variables);
  for (const auto& r : rows) {
    CHECK(r.status == milp::Status::Optimal);
    CHECK(r.median_seconds >= 0);
  }
  const auto csv = bench_to_csv(rows);
  CHECK(csv.rfind("n0,n1,radius,variables,constraints,binaries,median_seconds,median_nodes,status\n", 0) == 0);
  config.repeats = 0;
  CHECK_THROWS_AS(run_bench(config), std::invalid_argument);
}
