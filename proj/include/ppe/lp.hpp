#pragma once

// Small dense linear programming solver (two-phase tableau simplex).
// Sized for the feasibility and certificate problems that show up around
// the payoff-set iteration: tens of variables, up to a few thousand rows.

#include <span>
#include <vector>

namespace ppe::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Row-major inequality system A x <= b over free variables.
struct Inequalities {
  std::size_t num_vars = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;

  void add(std::vector<double> row, double b) {
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
};

// minimize c.x subject to A x <= b, x free.
Result minimize(std::span<const double> c, const Inequalities& system);

}  // namespace ppe::lp
