#include "cpul/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "cpul/error.hpp"

namespace cpul::eval {
namespace {

void check_lengths(std::span<const Interval> intervals, std::span<const double> ys) {
  if (intervals.size() != ys.size()) throw Error("intervals and labels differ in length");
  if (ys.empty()) throw Error("no samples to evaluate");
}

}  // namespace

double picp(std::span<const Interval> intervals, std::span<const double> ys) {
  check_lengths(intervals, ys);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) covered += intervals[i].contains(ys[i]) ? 1 : 0;
  return 100.0 * static_cast<double>(covered) / static_cast<double>(ys.size());
}

NormalizedLength normalized_length_detail(std::span<const Interval> intervals,
                                          std::span<const double> ys) {
  check_lengths(intervals, ys);
  double largest = 0.0;
  for (double y : ys) largest = std::max(largest, std::abs(y));
  const double cutoff = 1e-12 * largest;

  NormalizedLength out;
  double sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double mag = std::abs(ys[i]);
    if (mag < cutoff || mag == 0.0) {
      ++out.excluded;
      continue;
    }
    sum += intervals[i].width() / mag;
    ++kept;
  }
  if (kept == 0) throw Error("normalized length undefined: every label is zero");
  if (out.excluded > 0) {
    std::clog << "warning: normalized length excluded " << out.excluded
              << " sample(s) with near-zero label\n";
  }
  out.percent = 100.0 * sum / static_cast<double>(kept);
  return out;
}

}  // namespace cpul::eval
