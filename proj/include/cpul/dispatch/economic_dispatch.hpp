#pragma once

#include <Eigen/Dense>

#include "cpul/dispatch/grid_case.hpp"
#include "cpul/random.hpp"

namespace cpul::dispatch {

// Feasible point of the soft-thermal-limit dispatch LP.
struct PrimalSolution {
  Eigen::VectorXd p;   // generation
  Eigen::VectorXd f;   // line flows
  Eigen::VectorXd xi;  // thermal violations
  double objective = 0.0;
};

// Point of the LP dual: lambda (power balance), pi (flow definition),
// mu_lo / mu_hi (thermal rows), z_lo / z_hi (generator bounds), y (xi >= 0).
struct DualSolution {
  double lambda = 0.0;
  Eigen::VectorXd pi;
  Eigen::VectorXd mu_lo;
  Eigen::VectorXd mu_hi;
  Eigen::VectorXd z_lo;
  Eigen::VectorXd z_hi;
  Eigen::VectorXd y;
  double objective = 0.0;
};

// c'p + M e'xi.
double primal_objective(const GridCase& grid, const Eigen::VectorXd& p, const Eigen::VectorXd& xi);

// lambda e'd + (Phi A_d d)'pi + f_min'mu_lo - f_max'mu_hi + p_min'z_lo - p_max'z_hi.
double dual_objective(const GridCase& grid, const Eigen::VectorXd& d, const DualSolution& dual);

// Largest violation of the primal constraints (balance, flow definition,
// thermal rows, bounds, xi >= 0), absolute.
double primal_infeasibility(const GridCase& grid, const Eigen::VectorXd& d,
                            const PrimalSolution& sol);

// Largest violation of the dual equalities and sign constraints, absolute.
double dual_infeasibility(const GridCase& grid, const DualSolution& dual);

struct DispatchSolution {
  PrimalSolution primal;
  DualSolution dual;
  bool congested = false;  // some thermal row has a nonzero multiplier
};

// Solves the dispatch LP exactly. Throws cpul::Error("infeasible demand")
// when total demand is outside the aggregate generator limits, and
// cpul::Error on any non-optimal solver status.
DispatchSolution solve_dispatch(const GridCase& grid, const Eigen::VectorXd& d);

// d_l = alpha * beta_l * d0_l.
struct LoadSample {
  Eigen::VectorXd d;
  double alpha_factor = 1.0;
  Eigen::VectorXd beta_factors;
};

struct FactorRange {
  double lo = 1.0;
  double hi = 1.0;
};

inline constexpr FactorRange kDefaultGlobalRange{0.6, 1.0};
inline constexpr FactorRange kDefaultLocalRange{0.85, 1.15};

// alpha ~ U(global), beta_l ~ U(local) independently. Throws cpul::Error on
// non-positive or reversed ranges.
LoadSample sample_loads(const GridCase& grid, FactorRange global, FactorRange local, Rng& rng);

}  // namespace cpul::dispatch
