#include "cpul/dispatch/economic_dispatch.hpp"

#include <algorithm>
#include <cmath>

#include "cpul/dispatch/lp_solver.hpp"
#include "cpul/error.hpp"

namespace cpul::dispatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Multipliers within this of zero are treated as zero when splitting signs.
constexpr double kSignSnap = 1e-9;

double clean(double v) { return std::abs(v) < kSignSnap ? 0.0 : v; }

}  // namespace

double primal_objective(const GridCase& grid, const Eigen::VectorXd& p, const Eigen::VectorXd& xi) {
  return grid.c.dot(p) + grid.big_m * xi.sum();
}

double dual_objective(const GridCase& grid, const Eigen::VectorXd& d, const DualSolution& dual) {
  const Eigen::VectorXd load_flow = grid.ptdf_load() * d;
  return dual.lambda * d.sum() + load_flow.dot(dual.pi) + grid.f_min.dot(dual.mu_lo) -
         grid.f_max.dot(dual.mu_hi) + grid.p_min.dot(dual.z_lo) - grid.p_max.dot(dual.z_hi);
}

double primal_infeasibility(const GridCase& grid, const Eigen::VectorXd& d,
                            const PrimalSolution& sol) {
  double worst = std::abs(sol.p.sum() - d.sum());
  const Eigen::VectorXd flow_def = grid.ptdf_gen() * sol.p - sol.f - grid.ptdf_load() * d;
  worst = std::max(worst, flow_def.cwiseAbs().maxCoeff());
  worst = std::max(worst, (grid.f_min - sol.f - sol.xi).maxCoeff());
  worst = std::max(worst, (sol.f - sol.xi - grid.f_max).maxCoeff());
  worst = std::max(worst, (grid.p_min - sol.p).maxCoeff());
  worst = std::max(worst, (sol.p - grid.p_max).maxCoeff());
  worst = std::max(worst, (-sol.xi).maxCoeff());
  return std::max(worst, 0.0);
}

double dual_infeasibility(const GridCase& grid, const DualSolution& dual) {
  const auto G = grid.c.size();
  const Eigen::VectorXd stationarity_p = Eigen::VectorXd::Constant(G, dual.lambda) +
                                         grid.ptdf_gen().transpose() * dual.pi + dual.z_lo -
                                         dual.z_hi - grid.c;
  const Eigen::VectorXd stationarity_f = -dual.pi + dual.mu_lo - dual.mu_hi;
  const Eigen::VectorXd stationarity_xi =
      dual.mu_lo + dual.mu_hi + dual.y - Eigen::VectorXd::Constant(dual.y.size(), grid.big_m);
  double worst = stationarity_p.cwiseAbs().maxCoeff();
  if (stationarity_f.size() > 0) {
    worst = std::max(worst, stationarity_f.cwiseAbs().maxCoeff());
    worst = std::max(worst, stationarity_xi.cwiseAbs().maxCoeff());
  }
  for (const auto* v : {&dual.mu_lo, &dual.mu_hi, &dual.z_lo, &dual.z_hi, &dual.y}) {
    if (v->size() > 0) worst = std::max(worst, (-*v).maxCoeff());
  }
  return std::max(worst, 0.0);
}

DispatchSolution solve_dispatch(const GridCase& grid, const Eigen::VectorXd& d) {
  const auto G = static_cast<Eigen::Index>(grid.n_gen);
  const auto E = static_cast<Eigen::Index>(grid.n_line);
  if (d.size() != static_cast<Eigen::Index>(grid.n_load)) throw Error("load vector has wrong size");
  const double demand = d.sum();
  const double slack = 1e-9 * std::max(1.0, std::abs(demand));
  if (demand < grid.p_min.sum() - slack || demand > grid.p_max.sum() + slack) {
    throw Error("infeasible demand");
  }

  // Columns: p (G) | f (E) | xi (E) | s_lo (E) | s_hi (E).
  // Rows:    balance | flow definition (E) | f + xi - s_lo = f_min (E)
  //          | -f + xi - s_hi = -f_max (E).
  const Eigen::Index n = G + 4 * E;
  const Eigen::Index m = 1 + 3 * E;
  const Eigen::Index col_f = G, col_xi = G + E, col_slo = G + 2 * E, col_shi = G + 3 * E;
  const Eigen::Index row_flow = 1, row_lo = 1 + E, row_hi = 1 + 2 * E;

  LpProblem lp;
  lp.c = Eigen::VectorXd::Zero(n);
  lp.c.head(G) = grid.c;
  lp.c.segment(col_xi, E).setConstant(grid.big_m);
  lp.a_eq = Eigen::MatrixXd::Zero(m, n);
  lp.b_eq = Eigen::VectorXd::Zero(m);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, kInf);
  lp.lower.head(G) = grid.p_min;
  lp.upper.head(G) = grid.p_max;
  lp.lower.segment(col_f, E).setConstant(-kInf);

  lp.a_eq.block(0, 0, 1, G).setOnes();
  lp.b_eq[0] = demand;
  const Eigen::MatrixXd ptdf_gen = grid.ptdf_gen();
  const Eigen::VectorXd load_flow = grid.ptdf_load() * d;
  for (Eigen::Index e = 0; e < E; ++e) {
    lp.a_eq.block(row_flow + e, 0, 1, G) = ptdf_gen.row(e);
    lp.a_eq(row_flow + e, col_f + e) = -1.0;
    lp.b_eq[row_flow + e] = load_flow[e];

    lp.a_eq(row_lo + e, col_f + e) = 1.0;
    lp.a_eq(row_lo + e, col_xi + e) = 1.0;
    lp.a_eq(row_lo + e, col_slo + e) = -1.0;
    lp.b_eq[row_lo + e] = grid.f_min[e];

    lp.a_eq(row_hi + e, col_f + e) = -1.0;
    lp.a_eq(row_hi + e, col_xi + e) = 1.0;
    lp.a_eq(row_hi + e, col_shi + e) = -1.0;
    lp.b_eq[row_hi + e] = -grid.f_max[e];
  }

  const LpResult r = lp_solve(lp);
  if (r.status != LpStatus::optimal) {
    throw Error(std::string("dispatch LP not solved: ") + to_string(r.status));
  }

  DispatchSolution out;
  auto& primal = out.primal;
  primal.p = r.x.head(G).cwiseMax(grid.p_min).cwiseMin(grid.p_max);
  primal.f = r.x.segment(col_f, E);
  primal.xi = r.x.segment(col_xi, E).cwiseMax(0.0);
  primal.objective = primal_objective(grid, primal.p, primal.xi);

  auto& dual = out.dual;
  dual.lambda = r.duals[0];
  dual.pi = r.duals.segment(row_flow, E);
  dual.mu_lo = r.duals.segment(row_lo, E).unaryExpr(&clean).cwiseMax(0.0);
  dual.mu_hi = r.duals.segment(row_hi, E).unaryExpr(&clean).cwiseMax(0.0);
  dual.y = r.reduced_costs.segment(col_xi, E).unaryExpr(&clean).cwiseMax(0.0);
  const Eigen::VectorXd z = r.reduced_costs.head(G);
  dual.z_lo = z.cwiseMax(0.0);
  dual.z_hi = (-z).cwiseMax(0.0);
  dual.objective = dual_objective(grid, d, dual);
  out.congested = (dual.mu_lo.array() > 0.0).any() || (dual.mu_hi.array() > 0.0).any();
  return out;
}

LoadSample sample_loads(const GridCase& grid, FactorRange global, FactorRange local, Rng& rng) {
  for (const auto& r : {global, local}) {
    if (!(r.lo > 0.0 && r.lo <= r.hi)) throw Error("load factor ranges must be positive and ordered");
  }
  LoadSample s;
  s.alpha_factor = rng.uniform(global.lo, global.hi);
  s.beta_factors.resize(grid.d0.size());
  s.d.resize(grid.d0.size());
  for (Eigen::Index l = 0; l < grid.d0.size(); ++l) {
    s.beta_factors[l] = rng.uniform(local.lo, local.hi);
    s.d[l] = s.alpha_factor * s.beta_factors[l] * grid.d0[l];
  }
  return s;
}

}  // namespace cpul::dispatch
