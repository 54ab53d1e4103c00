#pragma once

#include <memory>

#include "cpul/nested_family.hpp"

namespace cpul {

// Minimal-length-threshold wrapper around a (strengthened) offset family.
//
//   gap <= ell            -> [b_lo, b_hi] for every t
//   t > kappa(x)          -> strengthened C_t(x)
//   otherwise             -> strengthened C_kappa(x)
//
// kappa(x) = inf{t : ell <= |strengthened C_t(x)|}. With ell = 0 the family
// is exactly the strengthened inner family.
class OmltFamily final : public NestedFamily {
 public:
  OmltFamily(std::shared_ptr<const OffsetFamily> inner, double ell);

  Interval evaluate(const BoundedSample& sample, double t) const override;
  double min_covering_t(const BoundedSample& sample) const override;
  std::string name() const override;

  double ell() const { return ell_; }
  const OffsetFamily& inner() const { return *inner_; }

  // kappa with the closed-form fast path when strengthening does not truncate.
  double kappa(const BoundedSample& sample) const;

 private:
  bool uses_bound_pair(const BoundedSample& sample) const;

  std::shared_ptr<const OffsetFamily> inner_;
  double ell_;
};

// Wraps one of the offset families. Throws cpul::Error on ell < 0 or on a
// family that is not an OffsetFamily.
FamilyPtr omlt_wrap(const FamilyPtr& inner, double ell);

// (ell - (U - L)) / 2 for an absolute offset family with endpoints L, U.
double kappa_closed_form(double lower, double upper, double ell);

// kappa by bisection on the strengthened width, to 1e-12 relative.
double kappa_bisection(const OffsetFamily& family, const BoundedSample& sample, double ell);

}  // namespace cpul
