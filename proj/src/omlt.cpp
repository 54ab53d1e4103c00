#include "cpul/omlt.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cpul/error.hpp"

namespace cpul {
namespace {

double strengthened_width(const OffsetFamily& family, const BoundedSample& s, double t) {
  return strengthen(family.evaluate(s, t), s.b_lo, s.b_hi).width();
}

}  // namespace

double kappa_closed_form(double lower, double upper, double ell) {
  return 0.5 * (ell - (upper - lower));
}

double kappa_bisection(const OffsetFamily& family, const BoundedSample& sample, double ell) {
  if (ell < 0.0) throw Error("ell must be nonnegative");
  if (ell == 0.0) return -kInf;
  if (sample.gap() < ell) throw Error("strengthened width never reaches ell");

  // lo: width below ell, hi: width at least ell.
  double lo = -1.0;
  for (double step = 1.0; strengthened_width(family, sample, lo) >= ell; step *= 2.0) {
    lo -= step;
  }
  double hi = 1.0;
  for (double step = 1.0; strengthened_width(family, sample, hi) < ell; step *= 2.0) {
    hi += step;
  }
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (strengthened_width(family, sample, mid) >= ell ? hi : lo) = mid;
  }
  return hi;
}

OmltFamily::OmltFamily(std::shared_ptr<const OffsetFamily> inner, double ell)
    : inner_(std::move(inner)), ell_(ell) {
  if (!inner_) throw Error("null family");
  if (!(ell_ >= 0.0)) throw Error("ell must be nonnegative");
}

std::string OmltFamily::name() const {
  return "omlt(" + inner_->name() + ", ell=" + std::to_string(ell_) + ")";
}

bool OmltFamily::uses_bound_pair(const BoundedSample& sample) const {
  return ell_ > 0.0 && sample.gap() <= ell_;
}

double OmltFamily::kappa(const BoundedSample& sample) const {
  if (ell_ == 0.0) return -kInf;
  if (inner_->scaling() == OffsetScaling::absolute) {
    const double lower = inner_->lower_endpoint(sample);
    const double upper = inner_->upper_endpoint(sample);
    const double k = kappa_closed_form(lower, upper, ell_);
    if (lower - k >= sample.b_lo && upper + k <= sample.b_hi) return k;
  }
  return kappa_bisection(*inner_, sample, ell_);
}

Interval OmltFamily::evaluate(const BoundedSample& sample, double t) const {
  if (uses_bound_pair(sample)) return {sample.b_lo, sample.b_hi};
  const double k = kappa(sample);
  const double effective = t > k ? t : k;
  return strengthen(inner_->evaluate(sample, effective), sample.b_lo, sample.b_hi);
}

double OmltFamily::min_covering_t(const BoundedSample& sample) const {
  if (sample.y < sample.b_lo || sample.y > sample.b_hi) {
    throw Error("family cannot cover sample");
  }
  if (uses_bound_pair(sample)) return -kInf;
  // Inside the bounds strengthening does not change membership, so the inner
  // score is exact for the strengthened family too.
  const double inner_score = inner_->min_covering_t(sample);
  return inner_score <= kappa(sample) ? -kInf : inner_score;
}

FamilyPtr omlt_wrap(const FamilyPtr& inner, double ell) {
  if (ell < 0.0) throw Error("ell must be nonnegative");
  auto offset = std::dynamic_pointer_cast<const OffsetFamily>(inner);
  if (!offset) throw Error("OMLT requires an offset family");
  return std::make_shared<OmltFamily>(std::move(offset), ell);
}

}  // namespace cpul
