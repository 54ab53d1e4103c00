#include "cpul/dispatch/lp_solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "cpul/error.hpp"

namespace cpul::dispatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState { basic, at_lower, at_upper, free_zero };

// Working state shared by both phases. Columns [0, n) are structural,
// [n, n + m) artificial with column sign_i * e_i.
class Simplex {
 public:
  Simplex(const LpProblem& p, const LpOptions& opt)
      : p_(p), opt_(opt), m_(p.a_eq.rows()), n_(p.a_eq.cols()) {
    lower_.resize(n_ + m_);
    upper_.resize(n_ + m_);
    lower_.head(n_) = p.lower;
    upper_.head(n_) = p.upper;
    state_.assign(n_ + m_, VarState::at_lower);
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (std::isfinite(lower_[j])) {
        state_[j] = VarState::at_lower;
      } else if (std::isfinite(upper_[j])) {
        state_[j] = VarState::at_upper;
      } else {
        state_[j] = VarState::free_zero;
      }
    }
    Eigen::VectorXd residual = p.b_eq;
    for (Eigen::Index j = 0; j < n_; ++j) residual -= p.a_eq.col(j) * nonbasic_value(j);
    sign_.resize(m_);
    basis_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      sign_[i] = residual[i] >= 0.0 ? 1.0 : -1.0;
      lower_[n_ + i] = 0.0;
      upper_[n_ + i] = kInf;
      basis_[i] = n_ + i;
      state_[n_ + i] = VarState::basic;
    }
  }

  // Phase 1: minimize the sum of artificials. Returns the final status.
  LpStatus phase_one() {
    cost_ = Eigen::VectorXd::Zero(n_ + m_);
    cost_.tail(m_).setOnes();
    const LpStatus st = iterate();
    if (st != LpStatus::optimal) return st;
    double infeasibility = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) infeasibility += std::abs(x_basic_[i]);
    }
    const double scale = 1.0 + (m_ > 0 ? p_.b_eq.cwiseAbs().maxCoeff() : 0.0);
    if (infeasibility > opt_.feasibility_tol * scale) return LpStatus::infeasible;
    return LpStatus::optimal;
  }

  LpStatus phase_two() {
    // Artificials are pinned at zero from here on.
    for (Eigen::Index i = 0; i < m_; ++i) upper_[n_ + i] = 0.0;
    drive_out_artificials();
    cost_ = Eigen::VectorXd::Zero(n_ + m_);
    cost_.head(n_) = p_.c;
    return iterate();
  }

  LpResult result(LpStatus status) {
    LpResult r;
    r.status = status;
    r.iterations = iterations_;
    if (status != LpStatus::optimal) return r;
    refresh();
    r.x.resize(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      r.x[j] = state_[j] == VarState::basic ? 0.0 : nonbasic_value(j);
    }
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) r.x[basis_[i]] = x_basic_[i];
    }
    r.duals = duals_;
    r.reduced_costs = p_.c - p_.a_eq.transpose() * duals_;
    r.objective = p_.c.dot(r.x);
    return r;
  }

 private:
  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < n_) return p_.a_eq.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e[j - n_] = sign_[j - n_];
    return e;
  }

  double nonbasic_value(Eigen::Index j) const {
    switch (state_[j]) {
      case VarState::at_lower: return lower_[j];
      case VarState::at_upper: return upper_[j];
      default: return 0.0;
    }
  }

  // Refactorizes the basis and recomputes basic values and duals.
  void refresh() {
    Eigen::MatrixXd b(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) b.col(i) = column(basis_[i]);
    lu_.compute(b);
    Eigen::VectorXd rhs = p_.b_eq;
    for (Eigen::Index j = 0; j < n_ + m_; ++j) {
      if (state_[j] != VarState::basic) {
        const double v = nonbasic_value(j);
        if (v != 0.0) rhs -= column(j) * v;
      }
    }
    x_basic_ = lu_.solve(rhs);
    Eigen::VectorXd c_b(m_);
    for (Eigen::Index i = 0; i < m_; ++i) c_b[i] = cost_[basis_[i]];
    duals_ = lu_.transpose().solve(c_b);
  }

  void pivot(Eigen::Index row, Eigen::Index entering, VarState leaving_state) {
    state_[basis_[row]] = leaving_state;
    basis_[row] = entering;
    state_[entering] = VarState::basic;
  }

  // After phase 1, swap zero-valued artificials out of the basis where a
  // structural column can take their place. Rows with no such column are
  // redundant and keep their (fixed at zero) artificial.
  void drive_out_artificials() {
    refresh();
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(m_);
      unit[i] = 1.0;
      const Eigen::VectorXd row = lu_.transpose().solve(unit);  // row i of B^-1
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (state_[j] == VarState::basic) continue;
        if (std::abs(row.dot(p_.a_eq.col(j))) > 1e-7) {
          pivot(i, j, VarState::at_lower);
          refresh();
          break;
        }
      }
    }
  }

  LpStatus iterate() {
    for (;;) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::iteration_limit;
      refresh();

      // Bland: the lowest-index improving nonbasic column enters.
      Eigen::Index entering = -1;
      double direction = 0.0;
      for (Eigen::Index j = 0; j < n_ + m_ && entering < 0; ++j) {
        const VarState s = state_[j];
        if (s == VarState::basic || lower_[j] == upper_[j]) continue;
        const double d = cost_[j] - column(j).dot(duals_);
        const bool can_increase = s == VarState::at_lower || s == VarState::free_zero;
        const bool can_decrease = s == VarState::at_upper || s == VarState::free_zero;
        if (can_increase && d < -opt_.optimality_tol) {
          entering = j;
          direction = 1.0;
        } else if (can_decrease && d > opt_.optimality_tol) {
          entering = j;
          direction = -1.0;
        }
      }
      if (entering < 0) return LpStatus::optimal;
      ++iterations_;

      const Eigen::VectorXd w = lu_.solve(column(entering));
      double step = upper_[entering] - lower_[entering];  // bound flip; inf if unbounded
      Eigen::Index leave_row = -1;
      VarState leave_state = VarState::at_lower;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double rate = -direction * w[i];  // d x_B[i] / d step
        const Eigen::Index var = basis_[i];
        double limit = kInf;
        VarState hits = VarState::at_lower;
        if (rate < -opt_.pivot_tol && std::isfinite(lower_[var])) {
          limit = std::max(0.0, x_basic_[i] - lower_[var]) / -rate;
          hits = VarState::at_lower;
        } else if (rate > opt_.pivot_tol && std::isfinite(upper_[var])) {
          limit = std::max(0.0, upper_[var] - x_basic_[i]) / rate;
          hits = VarState::at_upper;
        }
        if (!std::isfinite(limit)) continue;
        // Ties broken by the smallest variable index.
        if (limit < step || (limit == step && leave_row >= 0 && var < basis_[leave_row])) {
          step = limit;
          leave_row = i;
          leave_state = hits;
        }
      }
      if (!std::isfinite(step)) return LpStatus::unbounded;
      if (leave_row < 0) {
        state_[entering] = direction > 0 ? VarState::at_upper : VarState::at_lower;
      } else {
        pivot(leave_row, entering, leave_state);
      }
    }
  }

  const LpProblem& p_;
  const LpOptions& opt_;
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd cost_;
  Eigen::VectorXd sign_;
  std::vector<VarState> state_;
  std::vector<Eigen::Index> basis_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd x_basic_;
  Eigen::VectorXd duals_;
  int iterations_ = 0;
};

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

LpResult lp_solve(const LpProblem& problem, const LpOptions& options) {
  const auto n = problem.c.size();
  const auto m = problem.b_eq.size();
  if (problem.a_eq.rows() != m || problem.a_eq.cols() != n || problem.lower.size() != n ||
      problem.upper.size() != n) {
    throw Error("lp_solve: inconsistent dimensions");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (problem.lower[j] > problem.upper[j] || problem.lower[j] == kInf ||
        problem.upper[j] == -kInf) {
      LpResult r;
      r.status = LpStatus::infeasible;
      return r;
    }
  }
  Simplex simplex(problem, options);
  const LpStatus first = simplex.phase_one();
  if (first != LpStatus::optimal) return simplex.result(first);
  return simplex.result(simplex.phase_two());
}

}  // namespace cpul::dispatch
