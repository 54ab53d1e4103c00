#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cpul/interval.hpp"
#include "cpul/nested_family.hpp"

namespace cpul {

// Output of nested conformal calibration: a family and its threshold.
struct CalibratedModel {
  FamilyPtr family;
  double tau = 0.0;
  double alpha = 0.1;
  bool strengthen = true;
};

// Rank k = ceil((1 - alpha)(n + 1)) used by the calibration rule.
std::size_t conformal_rank(std::size_t n, double alpha);

// tau = k-th smallest score, or `sup` when k > n. The coverage count
// #{i : s_i <= t} is a step function of t, so this is the infimum of the
// admissible thresholds. Throws on empty scores or alpha outside (0, 1).
double conformal_threshold(std::span<const double> scores, double alpha, double sup);

// Per-sample nonconformity scores t_i = inf{t : y_i in C_t(x_i)}.
std::vector<double> covering_scores(const NestedFamily& family,
                                    std::span<const BoundedSample> samples);

CalibratedModel calibrate(FamilyPtr family, std::span<const BoundedSample> cal_set, double alpha);

// C_tau(x), intersected with [b_lo, b_hi] when the model says so.
Interval predict(const CalibratedModel& model, const BoundedSample& sample);

// Mean predicted width over a sample set.
double mean_width(const CalibratedModel& model, std::span<const BoundedSample> samples);

// Finite-sample coverage lower bound for the model picked by CPUL selection:
// ((1 + n)/n)(1 - alpha) - eta / sqrt(n), eta = sqrt(ln 8 / 2) + 1/3.
double selection_coverage_bound(std::size_t n_cal, double alpha);

// The eta constant above.
double selection_eta();

}  // namespace cpul
