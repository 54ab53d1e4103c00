#pragma once

#include <memory>
#include <string>

#include "cpul/interval.hpp"

namespace cpul {

// Parameter domain T of a nested family, a (possibly unbounded) interval.
struct ParameterDomain {
  double lo = -kInf;
  double hi = kInf;
};

// A monotone one-parameter family t -> C_t(x): t <= t' implies
// C_t(x) subset-of C_t'(x). C at inf(T) is empty and C at sup(T) is the full
// line (before strengthening).
class NestedFamily {
 public:
  virtual ~NestedFamily() = default;

  virtual Interval evaluate(const BoundedSample& sample, double t) const = 0;

  virtual ParameterDomain domain() const { return {}; }

  // Smallest t with y in C_t(x). The default implementation bisects over the
  // domain to 1e-12 * max(1, |y|); closed-form families override it.
  // Throws cpul::Error("family cannot cover sample") when y is outside C at sup(T).
  virtual double min_covering_t(const BoundedSample& sample) const;

  virtual std::string name() const = 0;
};

using FamilyPtr = std::shared_ptr<const NestedFamily>;

// Generic bisection route, independent of any closed form.
double bisect_min_covering_t(const NestedFamily& family, const BoundedSample& sample);

// Returns `guess` if C_guess(x) already contains y, otherwise the smallest
// double above it that does. Endpoints are monotone in t under rounding for
// every family here, so the result guarantees y in C_t for all t >= result.
double refine_min_covering_t(const NestedFamily& family, const BoundedSample& sample,
                             double guess);

// Which certified bound an endpoint is anchored to.
enum class Anchor { lower_bound, upper_bound };

struct EndpointRule {
  Anchor anchor = Anchor::lower_bound;
  double shift = 0.0;

  double value(const BoundedSample& s) const {
    return (anchor == Anchor::lower_bound ? s.b_lo : s.b_hi) + shift;
  }
};

// Offset scaling: `absolute` moves both endpoints by t, `relative` by
// t * (b_hi - b_lo).
enum class OffsetScaling { absolute, relative };

// C_t(x) = [L(x) - t s(x), U(x) + t s(x)] over T = R, with L and U given by
// endpoint rules and s(x) = 1 or the bound gap. Covers the CQR, CQR-r and
// all four CPUL families.
class OffsetFamily final : public NestedFamily {
 public:
  OffsetFamily(EndpointRule lower, EndpointRule upper, OffsetScaling scaling, std::string name);

  Interval evaluate(const BoundedSample& sample, double t) const override;

  // max(L - y, y - U) / s(x), refined to the exact floating-point boundary.
  // Relative families return 0 on samples with zero bound gap.
  double min_covering_t(const BoundedSample& sample) const override;

  std::string name() const override { return name_; }

  double lower_endpoint(const BoundedSample& s) const { return lower_.value(s); }
  double upper_endpoint(const BoundedSample& s) const { return upper_.value(s); }
  const EndpointRule& lower_rule() const { return lower_; }
  const EndpointRule& upper_rule() const { return upper_; }
  OffsetScaling scaling() const { return scaling_; }

 private:
  double scale(const BoundedSample& s) const;

  EndpointRule lower_;
  EndpointRule upper_;
  OffsetScaling scaling_;
  std::string name_;
};

// Pre-strengthened family: C~_t(x) = C_t(x) intersected with [b_lo, b_hi].
class StrengthenedFamily final : public NestedFamily {
 public:
  explicit StrengthenedFamily(FamilyPtr inner);

  Interval evaluate(const BoundedSample& sample, double t) const override;
  ParameterDomain domain() const override { return inner_->domain(); }
  double min_covering_t(const BoundedSample& sample) const override;
  std::string name() const override { return "strengthened(" + inner_->name() + ")"; }

  const NestedFamily& inner() const { return *inner_; }

 private:
  FamilyPtr inner_;
};

}  // namespace cpul
