#pragma once

#include <cstddef>
#include <span>

#include "cpul/interval.hpp"

namespace cpul::eval {

// 100 * fraction of ys inside their interval. Throws on length mismatch or
// empty input.
double picp(std::span<const Interval> intervals, std::span<const double> ys);

struct NormalizedLength {
  double percent = 0.0;      // 100 * mean |C| / |y| over kept samples
  std::size_t excluded = 0;  // samples with |y| < 1e-12 * max|y|
};

// Throws when every sample is excluded. Logs a warning to stderr when some
// are.
NormalizedLength normalized_length_detail(std::span<const Interval> intervals,
                                          std::span<const double> ys);

inline double normalized_length(std::span<const Interval> intervals, std::span<const double> ys) {
  return normalized_length_detail(intervals, ys).percent;
}

}  // namespace cpul::eval
