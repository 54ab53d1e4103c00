#include "cpul/interval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cpul/error.hpp"

namespace cpul {

Interval intersect(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return {std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}

Interval strengthen(const Interval& interval, double b_lo, double b_hi) {
  if (!(b_lo <= b_hi)) throw Error("invalid bound pair");
  return intersect(interval, Interval(b_lo, b_hi));
}

void validate_sample(const BoundedSample& s, std::size_t index, double slack) {
  const auto where = [&] { return " (sample " + std::to_string(index) + ")"; };
  if (!std::isfinite(s.y) || !std::isfinite(s.b_lo) || !std::isfinite(s.b_hi)) {
    throw Error("non-finite value" + where());
  }
  for (double f : s.features) {
    if (!std::isfinite(f)) throw Error("non-finite feature" + where());
  }
  if (s.b_lo > s.y + slack || s.y > s.b_hi + slack) {
    throw Error("bound sandwich violated: b_lo <= y <= b_hi fails" + where());
  }
}

}  // namespace cpul
