#pragma once

#include <limits>
#include <optional>
#include <vector>

namespace cpul {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed interval [lo, hi] on the extended real line, or the empty set.
// Construction with lo > hi (or a NaN endpoint) yields the empty interval.
class Interval {
 public:
  constexpr Interval() = default;  // empty
  constexpr Interval(double lo, double hi) {
    if (lo <= hi) {
      lo_ = lo;
      hi_ = hi;
      empty_ = false;
    }
  }

  static constexpr Interval empty() { return {}; }
  static constexpr Interval full() { return {-kInf, kInf}; }

  constexpr bool is_empty() const { return empty_; }
  constexpr double lo() const { return lo_; }
  constexpr double hi() const { return hi_; }

  // hi - lo for non-empty intervals, exactly 0 for the empty one.
  constexpr double width() const { return empty_ ? 0.0 : hi_ - lo_; }

  constexpr bool contains(double y) const { return !empty_ && lo_ <= y && y <= hi_; }

  // Inclusion in the set sense; the empty set is a subset of everything.
  constexpr bool subset_of(const Interval& other) const {
    if (empty_) return true;
    if (other.empty_) return false;
    return other.lo_ <= lo_ && hi_ <= other.hi_;
  }

  friend constexpr bool operator==(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool empty_ = true;
};

Interval intersect(const Interval& a, const Interval& b);

// Intersection with the certified bound pair [b_lo, b_hi].
// Throws cpul::Error("invalid bound pair") when b_lo > b_hi.
Interval strengthen(const Interval& interval, double b_lo, double b_hi);

// One calibration / evaluation record: problem features, the true optimal
// value and a certified bound pair around it.
struct BoundedSample {
  std::vector<double> features;
  double y = 0.0;
  double b_lo = 0.0;
  double b_hi = 0.0;

  double gap() const { return b_hi - b_lo; }
};

// Checks finiteness and b_lo <= y <= b_hi (with `slack` absolute tolerance on
// each side). Throws cpul::Error naming `index` on failure.
void validate_sample(const BoundedSample& s, std::size_t index, double slack = 0.0);

}  // namespace cpul
