#pragma once

#include <Eigen/Dense>

namespace cpul::dispatch {

// min c'x  s.t.  A x = b,  lower <= x <= upper  (bounds may be infinite).
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  int max_iterations = 100000;
};

// x, objective, duals and reduced costs are meaningful only when optimal.
// duals y satisfy reduced_costs = c - A'y.
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  Eigen::VectorXd duals;
  Eigen::VectorXd reduced_costs;
  double objective = 0.0;
  int iterations = 0;
};

// Two-phase bounded-variable revised simplex with Bland's rule for both the
// entering and the leaving choice. Dense basis factorization; intended for
// small instances (a few hundred variables). Throws cpul::Error on
// inconsistent dimensions.
LpResult lp_solve(const LpProblem& problem, const LpOptions& options = {});

}  // namespace cpul::dispatch
