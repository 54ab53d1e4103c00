#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "cpul/dispatch/economic_dispatch.hpp"
#include "cpul/dispatch/grid_case.hpp"
#include "cpul/interval.hpp"

namespace cpul::proxies {

using dispatch::DispatchSolution;
using dispatch::DualSolution;
using dispatch::GridCase;
using dispatch::LoadSample;
using dispatch::PrimalSolution;

// y = clamp(W x + b, clip_lo, clip_hi).
struct LinearPredictor {
  Eigen::MatrixXd weights;  // outputs x features
  Eigen::VectorXd bias;
  Eigen::VectorXd clip_lo;
  Eigen::VectorXd clip_hi;

  Eigen::Index n_outputs() const { return weights.rows(); }
  Eigen::Index n_features() const { return weights.cols(); }
  Eigen::VectorXd predict(const Eigen::VectorXd& x) const;
};

// All-zero predictor with unbounded clipping.
LinearPredictor zero_predictor(Eigen::Index n_outputs, Eigen::Index n_features);

// Ridge regression with an unpenalized intercept. Rows of `features` and
// `targets` are samples. Throws cpul::Error on a singular system when
// regularization is 0, and on bad shapes.
LinearPredictor fit_ridge(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                          double regularization);

// Proportional-headroom balancing: moves p_tilde toward p_max on shortfall and
// toward p_min on surplus so that sum(p) == total_demand.
Eigen::VectorXd power_balance(const Eigen::VectorXd& p_tilde, const Eigen::VectorXd& p_min,
                              const Eigen::VectorXd& p_max, double total_demand);

PrimalSolution primal_recover(const GridCase& grid, const Eigen::VectorXd& d,
                              const Eigen::VectorXd& p_tilde);

DualSolution dual_recover(const GridCase& grid, const Eigen::VectorXd& d, double lambda,
                          const Eigen::VectorXd& pi);

// Per-unit loads d / d0.
Eigen::VectorXd load_features(const GridCase& grid, const Eigen::VectorXd& d);

class PrimalProxy {
 public:
  // Output clipping is forced to [p_min, p_max].
  PrimalProxy(GridCase grid, LinearPredictor predictor);

  PrimalSolution operator()(const Eigen::VectorXd& d) const;
  const LinearPredictor& predictor() const { return predictor_; }

 private:
  GridCase grid_;
  LinearPredictor predictor_;
};

class DualProxy {
 public:
  // Output 0 is lambda (unclipped), outputs 1..E are pi clipped to [-M, M].
  DualProxy(GridCase grid, LinearPredictor predictor);

  DualSolution operator()(const Eigen::VectorXd& d) const;
  const LinearPredictor& predictor() const { return predictor_; }

 private:
  GridCase grid_;
  LinearPredictor predictor_;
};

PrimalProxy fit_primal_proxy(const GridCase& grid, const std::vector<Eigen::VectorXd>& loads,
                             const std::vector<DispatchSolution>& labels, double regularization);
DualProxy fit_dual_proxy(const GridCase& grid, const std::vector<Eigen::VectorXd>& loads,
                         const std::vector<DispatchSolution>& labels, double regularization);

PrimalProxy untrained_primal_proxy(const GridCase& grid);
DualProxy untrained_dual_proxy(const GridCase& grid);

// Absolute slack used for the sandwich assertion, relative to max(1, |y|).
inline constexpr double kSandwichSlack = 1e-8;

// One BoundedSample per load: features d / d0, y the LP optimum, b_hi the
// recovered primal objective, b_lo the recovered dual objective. Throws
// cpul::Error naming the sample when b_lo <= y <= b_hi fails beyond the
// slack; violations inside the slack are snapped onto y.
std::vector<BoundedSample> make_bounded_samples(const GridCase& grid,
                                                const std::vector<Eigen::VectorXd>& loads,
                                                const std::vector<double>& optimal_objectives,
                                                const PrimalProxy& primal, const DualProxy& dual);

// Same, solving the LP for each load.
std::vector<BoundedSample> make_bounded_samples(const GridCase& grid,
                                                const std::vector<Eigen::VectorXd>& loads,
                                                const PrimalProxy& primal, const DualProxy& dual);

}  // namespace cpul::proxies
