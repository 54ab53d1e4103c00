#include "cpul/nested_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "cpul/error.hpp"

namespace cpul {

double NestedFamily::min_covering_t(const BoundedSample& sample) const {
  return bisect_min_covering_t(*this, sample);
}

double bisect_min_covering_t(const NestedFamily& family, const BoundedSample& sample) {
  const auto covered = [&](double t) { return family.evaluate(sample, t).contains(sample.y); };
  const ParameterDomain dom = family.domain();

  if (!covered(dom.hi)) throw Error("family cannot cover sample");

  // Bracket: lo uncovered, hi covered.
  double hi = std::isfinite(dom.hi) ? dom.hi : 1.0;
  for (double step = 1.0; !covered(hi); step *= 2.0) {
    hi = std::min(dom.hi, hi + step);
    if (!std::isfinite(hi)) return dom.hi;
  }
  double lo = std::isfinite(dom.lo) ? dom.lo : std::min(hi, 0.0) - 1.0;
  if (covered(lo)) {
    if (std::isfinite(dom.lo)) return dom.lo;
    for (double step = 2.0; covered(lo); step *= 2.0) {
      lo = hi - step;
      if (!std::isfinite(lo)) return -kInf;
    }
  }

  const double tol = 1e-12 * std::max(1.0, std::abs(sample.y));
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (covered(mid) ? hi : lo) = mid;
  }
  return hi;
}

double refine_min_covering_t(const NestedFamily& family, const BoundedSample& sample,
                             double guess) {
  const auto covered = [&](double t) { return family.evaluate(sample, t).contains(sample.y); };
  if (!std::isfinite(guess) || covered(guess)) return guess;

  // Endpoint rounding left y just outside C_guess: find the smallest double
  // above guess that covers.
  double step = std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(guess));
  double lo = guess;
  double hi = guess + step;
  while (!covered(hi)) {
    lo = hi;
    step *= 2.0;
    hi = guess + step;
    if (!std::isfinite(hi)) throw Error("family cannot cover sample");
  }
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (covered(mid) ? hi : lo) = mid;
  }
  return hi;
}

OffsetFamily::OffsetFamily(EndpointRule lower, EndpointRule upper, OffsetScaling scaling,
                           std::string name)
    : lower_(lower), upper_(upper), scaling_(scaling), name_(std::move(name)) {}

double OffsetFamily::scale(const BoundedSample& s) const {
  return scaling_ == OffsetScaling::absolute ? 1.0 : s.gap();
}

Interval OffsetFamily::evaluate(const BoundedSample& sample, double t) const {
  if (t == kInf) return Interval::full();
  if (t == -kInf) return Interval::empty();
  const double offset = t * scale(sample);
  return {lower_endpoint(sample) - offset, upper_endpoint(sample) + offset};
}

double OffsetFamily::min_covering_t(const BoundedSample& sample) const {
  const double s = scale(sample);
  if (s == 0.0) {
    // Zero-gap sample under relative scaling: the family is constant in t.
    if (evaluate(sample, 0.0).contains(sample.y)) return 0.0;
    throw Error("family cannot cover sample");
  }
  const double raw =
      std::max(lower_endpoint(sample) - sample.y, sample.y - upper_endpoint(sample)) / s;
  return refine_min_covering_t(*this, sample, raw);
}

StrengthenedFamily::StrengthenedFamily(FamilyPtr inner) : inner_(std::move(inner)) {}

Interval StrengthenedFamily::evaluate(const BoundedSample& sample, double t) const {
  return strengthen(inner_->evaluate(sample, t), sample.b_lo, sample.b_hi);
}

double StrengthenedFamily::min_covering_t(const BoundedSample& sample) const {
  if (sample.y < sample.b_lo || sample.y > sample.b_hi) {
    throw Error("family cannot cover sample");
  }
  return refine_min_covering_t(*this, sample, inner_->min_covering_t(sample));
}

}  // namespace cpul
