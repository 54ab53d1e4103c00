#include "cpul/proxies/proxies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cpul/error.hpp"

namespace cpul::proxies {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error("inconsistent row length");
    m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return m;
}

Eigen::MatrixXd feature_matrix(const GridCase& grid, const std::vector<Eigen::VectorXd>& loads) {
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(loads.size());
  for (const auto& d : loads) rows.push_back(load_features(grid, d));
  return stack_rows(rows, static_cast<Eigen::Index>(grid.n_load));
}

}  // namespace

Eigen::VectorXd LinearPredictor::predict(const Eigen::VectorXd& x) const {
  if (x.size() != n_features()) throw Error("predictor: feature dimension mismatch");
  Eigen::VectorXd out = weights * x + bias;
  return out.cwiseMax(clip_lo).cwiseMin(clip_hi);
}

LinearPredictor zero_predictor(Eigen::Index n_outputs, Eigen::Index n_features) {
  return {Eigen::MatrixXd::Zero(n_outputs, n_features), Eigen::VectorXd::Zero(n_outputs),
          Eigen::VectorXd::Constant(n_outputs, -kInf), Eigen::VectorXd::Constant(n_outputs, kInf)};
}

LinearPredictor fit_ridge(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                          double regularization) {
  if (features.rows() != targets.rows()) throw Error("fit_ridge: row counts differ");
  if (features.rows() == 0) throw Error("fit_ridge: no samples");
  if (!(regularization >= 0.0) || !std::isfinite(regularization)) {
    throw Error("fit_ridge: regularization must be finite and >= 0");
  }
  if (!features.allFinite() || !targets.allFinite()) throw Error("fit_ridge: non-finite input");

  const Eigen::RowVectorXd x_mean = features.colwise().mean();
  const Eigen::RowVectorXd y_mean = targets.colwise().mean();
  const Eigen::MatrixXd xc = features.rowwise() - x_mean;
  const Eigen::MatrixXd yc = targets.rowwise() - y_mean;
  const auto F = features.cols();

  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += regularization;
  if (regularization == 0.0 && F > 0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(largest, 1e-300)) {
      throw Error("fit_ridge: normal equations are singular; use a positive regularization");
    }
  }
  const Eigen::MatrixXd w_t = gram.ldlt().solve(xc.transpose() * yc);  // F x O

  LinearPredictor out = zero_predictor(targets.cols(), F);
  out.weights = w_t.transpose();
  out.bias = (y_mean - x_mean * w_t).transpose();
  return out;
}

Eigen::VectorXd power_balance(const Eigen::VectorXd& p_tilde, const Eigen::VectorXd& p_min,
                              const Eigen::VectorXd& p_max, double total_demand) {
  if (p_tilde.size() != p_min.size() || p_tilde.size() != p_max.size()) {
    throw Error("power_balance: dimension mismatch");
  }
  if (!p_tilde.allFinite()) throw Error("power_balance: non-finite generation");
  const double lo_total = p_min.sum();
  const double hi_total = p_max.sum();
  if (!(total_demand >= lo_total && total_demand <= hi_total)) {
    throw Error("infeasible demand");
  }
  const Eigen::VectorXd p0 = p_tilde.cwiseMax(p_min).cwiseMin(p_max);
  const double total = p0.sum();
  Eigen::VectorXd p = p0;
  if (total < total_demand) {
    const double eta = (total_demand - total) / (hi_total - total);
    p = p0 + eta * (p_max - p0);
  } else if (total > total_demand) {
    const double eta = (total - total_demand) / (total - lo_total);
    p = p0 - eta * (p0 - p_min);
  }
  return p.cwiseMax(p_min).cwiseMin(p_max);
}

PrimalSolution primal_recover(const GridCase& grid, const Eigen::VectorXd& d,
                              const Eigen::VectorXd& p_tilde) {
  if (d.size() != static_cast<Eigen::Index>(grid.n_load)) throw Error("load dimension mismatch");
  PrimalSolution s;
  s.p = power_balance(p_tilde, grid.p_min, grid.p_max, d.sum());
  s.f = grid.ptdf_gen() * s.p - grid.ptdf_load() * d;
  s.xi = (s.f - grid.f_max).cwiseMax(grid.f_min - s.f).cwiseMax(0.0);
  s.objective = dispatch::primal_objective(grid, s.p, s.xi);
  return s;
}

DualSolution dual_recover(const GridCase& grid, const Eigen::VectorXd& d, double lambda,
                          const Eigen::VectorXd& pi) {
  if (d.size() != static_cast<Eigen::Index>(grid.n_load)) throw Error("load dimension mismatch");
  if (pi.size() != static_cast<Eigen::Index>(grid.n_line)) throw Error("line price dimension mismatch");
  if (!std::isfinite(lambda) || !pi.allFinite()) throw Error("dual_recover: non-finite prices");
  DualSolution s;
  s.lambda = lambda;
  s.pi = pi.cwiseMax(-grid.big_m).cwiseMin(grid.big_m);
  s.mu_lo = s.pi.cwiseMax(0.0);
  s.mu_hi = (-s.pi).cwiseMax(0.0);
  const Eigen::VectorXd z = grid.c - Eigen::VectorXd::Constant(grid.c.size(), lambda) -
                            grid.ptdf_gen().transpose() * s.pi;
  s.z_lo = z.cwiseMax(0.0);
  s.z_hi = (-z).cwiseMax(0.0);
  s.y = (Eigen::VectorXd::Constant(s.pi.size(), grid.big_m) - s.mu_lo - s.mu_hi).cwiseMax(0.0);
  s.objective = dispatch::dual_objective(grid, d, s);
  return s;
}

Eigen::VectorXd load_features(const GridCase& grid, const Eigen::VectorXd& d) {
  if (d.size() != grid.d0.size()) throw Error("load dimension mismatch");
  return d.cwiseQuotient(grid.d0);
}

PrimalProxy::PrimalProxy(GridCase grid, LinearPredictor predictor)
    : grid_(std::move(grid)), predictor_(std::move(predictor)) {
  if (predictor_.n_outputs() != static_cast<Eigen::Index>(grid_.n_gen) ||
      predictor_.n_features() != static_cast<Eigen::Index>(grid_.n_load)) {
    throw Error("primal proxy: predictor shape does not match the case");
  }
  predictor_.clip_lo = grid_.p_min;
  predictor_.clip_hi = grid_.p_max;
}

PrimalSolution PrimalProxy::operator()(const Eigen::VectorXd& d) const {
  return primal_recover(grid_, d, predictor_.predict(load_features(grid_, d)));
}

DualProxy::DualProxy(GridCase grid, LinearPredictor predictor)
    : grid_(std::move(grid)), predictor_(std::move(predictor)) {
  const auto E = static_cast<Eigen::Index>(grid_.n_line);
  if (predictor_.n_outputs() != 1 + E ||
      predictor_.n_features() != static_cast<Eigen::Index>(grid_.n_load)) {
    throw Error("dual proxy: predictor shape does not match the case");
  }
  predictor_.clip_lo = Eigen::VectorXd::Constant(1 + E, -grid_.big_m);
  predictor_.clip_hi = Eigen::VectorXd::Constant(1 + E, grid_.big_m);
  predictor_.clip_lo[0] = -kInf;
  predictor_.clip_hi[0] = kInf;
}

DualSolution DualProxy::operator()(const Eigen::VectorXd& d) const {
  const Eigen::VectorXd out = predictor_.predict(load_features(grid_, d));
  return dual_recover(grid_, d, out[0], out.tail(out.size() - 1));
}

PrimalProxy fit_primal_proxy(const GridCase& grid, const std::vector<Eigen::VectorXd>& loads,
                             const std::vector<DispatchSolution>& labels, double regularization) {
  if (loads.size() != labels.size()) throw Error("loads and labels differ in length");
  std::vector<Eigen::VectorXd> targets;
  targets.reserve(labels.size());
  for (const auto& l : labels) targets.push_back(l.primal.p);
  return {grid, fit_ridge(feature_matrix(grid, loads),
                          stack_rows(targets, static_cast<Eigen::Index>(grid.n_gen)),
                          regularization)};
}

DualProxy fit_dual_proxy(const GridCase& grid, const std::vector<Eigen::VectorXd>& loads,
                         const std::vector<DispatchSolution>& labels, double regularization) {
  if (loads.size() != labels.size()) throw Error("loads and labels differ in length");
  const auto E = static_cast<Eigen::Index>(grid.n_line);
  std::vector<Eigen::VectorXd> targets;
  targets.reserve(labels.size());
  for (const auto& l : labels) {
    Eigen::VectorXd t(1 + E);
    t << l.dual.lambda, l.dual.pi;
    targets.push_back(std::move(t));
  }
  return {grid, fit_ridge(feature_matrix(grid, loads), stack_rows(targets, 1 + E), regularization)};
}

PrimalProxy untrained_primal_proxy(const GridCase& grid) {
  return {grid, zero_predictor(static_cast<Eigen::Index>(grid.n_gen),
                               static_cast<Eigen::Index>(grid.n_load))};
}

DualProxy untrained_dual_proxy(const GridCase& grid) {
  return {grid, zero_predictor(1 + static_cast<Eigen::Index>(grid.n_line),
                               static_cast<Eigen::Index>(grid.n_load))};
}

std::vector<BoundedSample> make_bounded_samples(const GridCase& grid,
                                                const std::vector<Eigen::VectorXd>& loads,
                                                const std::vector<double>& optimal_objectives,
                                                const PrimalProxy& primal, const DualProxy& dual) {
  if (loads.size() != optimal_objectives.size()) throw Error("loads and objectives differ in length");
  std::vector<BoundedSample> out;
  out.reserve(loads.size());
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const Eigen::VectorXd x = load_features(grid, loads[i]);
    BoundedSample s;
    s.features.assign(x.data(), x.data() + x.size());
    s.y = optimal_objectives[i];
    s.b_hi = primal(loads[i]).objective;
    s.b_lo = dual(loads[i]).objective;
    validate_sample(s, i, kSandwichSlack * std::max(1.0, std::abs(s.y)));
    s.b_lo = std::min(s.b_lo, s.y);
    s.b_hi = std::max(s.b_hi, s.y);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<BoundedSample> make_bounded_samples(const GridCase& grid,
                                                const std::vector<Eigen::VectorXd>& loads,
                                                const PrimalProxy& primal, const DualProxy& dual) {
  std::vector<double> objectives;
  objectives.reserve(loads.size());
  for (const auto& d : loads) objectives.push_back(dispatch::solve_dispatch(grid, d).primal.objective);
  return make_bounded_samples(grid, loads, objectives, primal, dual);
}

}  // namespace cpul::proxies
