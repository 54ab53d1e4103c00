#include "cpul/calibration.hpp"

#include <cmath>
#include <numbers>

#include "cpul/error.hpp"
#include "cpul/quantile.hpp"

namespace cpul {

std::size_t conformal_rank(std::size_t n, double alpha) {
  return ceil_rank((1.0 - alpha) * static_cast<double>(n + 1));
}

double conformal_threshold(std::span<const double> scores, double alpha, double sup) {
  if (scores.empty()) throw Error("empty calibration set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  const std::size_t k = conformal_rank(scores.size(), alpha);
  if (k > scores.size()) return sup;
  return order_statistic(scores, std::max<std::size_t>(k, 1));
}

std::vector<double> covering_scores(const NestedFamily& family,
                                    std::span<const BoundedSample> samples) {
  std::vector<double> scores;
  scores.reserve(samples.size());
  for (const auto& s : samples) scores.push_back(family.min_covering_t(s));
  return scores;
}

CalibratedModel calibrate(FamilyPtr family, std::span<const BoundedSample> cal_set, double alpha) {
  if (!family) throw Error("null family");
  if (cal_set.empty()) throw Error("empty calibration set");
  const auto scores = covering_scores(*family, cal_set);
  const double tau = conformal_threshold(scores, alpha, family->domain().hi);
  return CalibratedModel{std::move(family), tau, alpha, true};
}

Interval predict(const CalibratedModel& model, const BoundedSample& sample) {
  const Interval raw = model.family->evaluate(sample, model.tau);
  return model.strengthen ? strengthen(raw, sample.b_lo, sample.b_hi) : raw;
}

double mean_width(const CalibratedModel& model, std::span<const BoundedSample> samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) total += predict(model, s).width();
  return total / static_cast<double>(samples.size());
}

double selection_eta() { return std::sqrt(std::numbers::ln2 * 3.0 / 2.0) + 1.0 / 3.0; }

double selection_coverage_bound(std::size_t n_cal, double alpha) {
  if (n_cal == 0) throw Error("n_cal must be positive");
  const double n = static_cast<double>(n_cal);
  return (1.0 + n) / n * (1.0 - alpha) - selection_eta() / std::sqrt(n);
}

}  // namespace cpul
