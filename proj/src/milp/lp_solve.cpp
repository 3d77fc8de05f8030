#include "invcert/milp.hpp"

#include "simplex.hpp"

#include <stdexcept>

namespace invcert::milp {

LpSolution lp_solve(const Model& model, bool relax) {
  if (!relax && model.num_binaries() > 0)
    throw std::invalid_argument("lp_solve without relaxation requires a model without binaries");
  detail::SimplexEngine engine(model);
  LpSolution solution;
  switch (engine.solve()) {
    case detail::LpStatus::Optimal: solution.status = Status::Optimal; break;
    case detail::LpStatus::Infeasible: solution.status = Status::Infeasible; break;
    case detail::LpStatus::Unbounded: solution.status = Status::Unbounded; break;
    case detail::LpStatus::NumericalFailure: solution.status = Status::NumericalFailure; break;
  }
  solution.iterations = engine.iterations();
  if (solution.status == Status::Optimal) {
    solution.values = engine.structural_values();
    solution.objective = model.objective_value(solution.values);
  }
  return solution;
}

}  // namespace invcert::milp
