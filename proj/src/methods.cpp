#include "cpul/methods.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cpul/error.hpp"
#include "cpul/quantile.hpp"
#include "cpul/random.hpp"

namespace cpul {
namespace {

double base_value(BaseBound base, const BoundedSample& s) {
  return base == BaseBound::lower ? s.b_lo : s.b_hi;
}

void require_nonempty(std::span<const BoundedSample> set, const char* what) {
  if (set.empty()) throw Error(std::string("empty ") + what);
}

}  // namespace

SplitCpModel split_cp_fit(BaseBound base, std::span<const BoundedSample> cal_set, double alpha) {
  require_nonempty(cal_set, "calibration set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  std::vector<double> residuals;
  residuals.reserve(cal_set.size());
  for (const auto& s : cal_set) residuals.push_back(s.y - base_value(base, s));

  const std::size_t n = residuals.size();
  const double n1 = static_cast<double>(n + 1);
  const std::size_t lo_rank = floor_rank(0.5 * alpha * n1);
  const std::size_t hi_rank = ceil_rank((1.0 - 0.5 * alpha) * n1);

  SplitCpModel model;
  model.base = base;
  model.alpha = alpha;
  model.offset_lo = lo_rank == 0 ? -kInf : order_statistic(residuals, std::min(lo_rank, n));
  model.offset_hi = hi_rank > n ? kInf : order_statistic(residuals, std::max<std::size_t>(hi_rank, 1));
  return model;
}

Interval predict(const SplitCpModel& model, const BoundedSample& sample) {
  const double b = base_value(model.base, sample);
  return strengthen({b + model.offset_lo, b + model.offset_hi}, sample.b_lo, sample.b_hi);
}

CalibratedModel cqr_fit(std::span<const BoundedSample> cal_set, double alpha) {
  auto family = std::make_shared<OffsetFamily>(EndpointRule{Anchor::lower_bound, 0.0},
                                               EndpointRule{Anchor::upper_bound, 0.0},
                                               OffsetScaling::absolute, "cqr");
  return calibrate(std::move(family), cal_set, alpha);
}

CalibratedModel cqr_r_fit(std::span<const BoundedSample> cal_set, double alpha) {
  auto family = std::make_shared<OffsetFamily>(EndpointRule{Anchor::lower_bound, 0.0},
                                               EndpointRule{Anchor::upper_bound, 0.0},
                                               OffsetScaling::relative, "cqr-r");
  return calibrate(std::move(family), cal_set, alpha);
}

ResidualQuantiles cpul_residual_quantiles(std::span<const BoundedSample> train_set, double alpha) {
  require_nonempty(train_set, "training set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  std::vector<double> r_l;
  std::vector<double> r_u;
  r_l.reserve(train_set.size());
  r_u.reserve(train_set.size());
  for (const auto& s : train_set) {
    r_l.push_back(s.y - s.b_lo);
    r_u.push_back(s.y - s.b_hi);
  }
  ResidualQuantiles q;
  q.alpha = alpha;
  q.q_l_lo = empirical_quantile(r_l, 0.5 * alpha);
  q.q_l_hi = empirical_quantile(r_l, 1.0 - 0.5 * alpha);
  q.q_u_lo = empirical_quantile(r_u, 0.5 * alpha);
  q.q_u_hi = empirical_quantile(r_u, 1.0 - 0.5 * alpha);
  return q;
}

std::string_view to_string(CpulVariant v) {
  switch (v) {
    case CpulVariant::ll: return "ll";
    case CpulVariant::lu: return "lu";
    case CpulVariant::ul: return "ul";
    case CpulVariant::uu: return "uu";
  }
  return "?";
}

std::shared_ptr<const OffsetFamily> cpul_family(const ResidualQuantiles& q, CpulVariant variant) {
  const EndpointRule lower_from_l{Anchor::lower_bound, q.q_l_lo};
  const EndpointRule lower_from_u{Anchor::upper_bound, q.q_u_lo};
  const EndpointRule upper_from_l{Anchor::lower_bound, q.q_l_hi};
  const EndpointRule upper_from_u{Anchor::upper_bound, q.q_u_hi};
  const bool lower_l = variant == CpulVariant::ll || variant == CpulVariant::lu;
  const bool upper_l = variant == CpulVariant::ll || variant == CpulVariant::ul;
  return std::make_shared<OffsetFamily>(lower_l ? lower_from_l : lower_from_u,
                                        upper_l ? upper_from_l : upper_from_u,
                                        OffsetScaling::absolute,
                                        "cpul-" + std::string(to_string(variant)));
}

CalibratedModel sfd_fit(std::span<const BoundedSample> train_set,
                        std::span<const BoundedSample> cal_set, double alpha) {
  const auto q = cpul_residual_quantiles(train_set, alpha);
  return calibrate(cpul_family(q, CpulVariant::ul), cal_set, alpha);
}

CpulVariant select_narrowest(const std::array<double, 4>& widths) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < widths.size(); ++i) {
    if (widths[i] < widths[best]) best = i;
  }
  return static_cast<CpulVariant>(best);
}

CpulModel cpul_select(const ResidualQuantiles& q, const std::array<FamilyPtr, 4>& families,
                      std::span<const BoundedSample> cal_set, double alpha) {
  require_nonempty(cal_set, "calibration set");
  CpulModel model;
  model.quantiles = q;
  for (std::size_t i = 0; i < families.size(); ++i) {
    model.variants[i] = calibrate(families[i], cal_set, alpha);
    model.tau[i] = model.variants[i].tau;
    model.mean_width[i] = mean_width(model.variants[i], cal_set);
  }
  model.selected = select_narrowest(model.mean_width);
  return model;
}

CpulModel cpul_fit(std::span<const BoundedSample> train_set,
                   std::span<const BoundedSample> cal_set, double alpha) {
  const auto q = cpul_residual_quantiles(train_set, alpha);
  std::array<FamilyPtr, 4> families;
  for (auto v : kCpulVariants) families[static_cast<std::size_t>(v)] = cpul_family(q, v);
  return cpul_select(q, families, cal_set, alpha);
}

std::vector<double> default_ell_grid(std::span<const BoundedSample> reserved) {
  require_nonempty(reserved, "reserved set");
  std::vector<double> gaps;
  gaps.reserve(reserved.size());
  for (const auto& s : reserved) gaps.push_back(s.gap());
  std::vector<double> grid{0.0};
  constexpr int kLevels = 24;
  for (int i = 0; i < kLevels; ++i) {
    const double level = 0.02 + (0.50 - 0.02) * i / (kLevels - 1);
    grid.push_back(std::max(0.0, empirical_quantile(gaps, level)));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

CalibrationSplit split_reserved(std::span<const BoundedSample> cal_set, std::size_t reserved_count,
                                std::uint64_t seed) {
  if (reserved_count >= cal_set.size()) {
    throw Error("reserved_count must be smaller than the calibration set");
  }
  const auto order = shuffled_indices(cal_set.size(), seed);
  CalibrationSplit split;
  split.reserved.reserve(reserved_count);
  split.remainder.reserve(cal_set.size() - reserved_count);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < reserved_count ? split.reserved : split.remainder).push_back(cal_set[order[i]]);
  }
  return split;
}

OmltModel omlt_fit(std::span<const BoundedSample> train_set,
                   std::span<const BoundedSample> cal_set, double alpha, const OmltConfig& config) {
  if (config.reserved_count == 0) throw Error("reserved_count must be positive");
  const auto split = split_reserved(cal_set, config.reserved_count, config.seed);
  const auto q = cpul_residual_quantiles(train_set, alpha);

  OmltModel model;
  model.grid = config.ell_grid.empty() ? default_ell_grid(split.reserved) : config.ell_grid;
  for (double ell : model.grid) {
    if (!(ell >= 0.0)) throw Error("ell must be nonnegative");
  }
  model.reserved_fraction =
      static_cast<double>(config.reserved_count) / static_cast<double>(cal_set.size());

  // Per variant: the threshold with the smallest reserved-set mean width at
  // the target level. Ties keep the smaller ell (grid order).
  std::array<FamilyPtr, 4> chosen;
  for (auto v : kCpulVariants) {
    const auto idx = static_cast<std::size_t>(v);
    const auto base = cpul_family(q, v);
    double best_width = kInf;
    double best_ell = 0.0;
    for (double ell : model.grid) {
      const auto cal = calibrate(omlt_wrap(base, ell), split.reserved, alpha);
      const double w = mean_width(cal, split.reserved);
      if (w < best_width) {
        best_width = w;
        best_ell = ell;
      }
    }
    model.variant_ell[idx] = best_ell;
    chosen[idx] = omlt_wrap(base, best_ell);
  }

  model.inner = cpul_select(q, chosen, split.remainder, alpha);
  model.ell = model.variant_ell[static_cast<std::size_t>(model.inner.selected)];
  return model;
}

std::string_view to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::split_cp_l: return "split-cp-l";
    case MethodKind::split_cp_u: return "split-cp-u";
    case MethodKind::sfd: return "sfd";
    case MethodKind::cqr: return "cqr";
    case MethodKind::cqr_r: return "cqr-r";
    case MethodKind::cpul: return "cpul";
    case MethodKind::cpul_omlt: return "cpul-omlt";
  }
  return "?";
}

MethodKind parse_method(std::string_view name) {
  for (auto kind : kAllMethods) {
    if (to_string(kind) == name) return kind;
  }
  std::string valid;
  for (auto kind : kAllMethods) {
    if (!valid.empty()) valid += ", ";
    valid += to_string(kind);
  }
  throw UsageError("unknown method '" + std::string(name) + "'; valid methods: " + valid);
}

MethodModel fit_method(const MethodConfig& config, std::span<const BoundedSample> train_set,
                       std::span<const BoundedSample> cal_set, double alpha, std::uint64_t seed) {
  switch (config.kind) {
    case MethodKind::split_cp_l: return split_cp_fit(BaseBound::lower, cal_set, alpha);
    case MethodKind::split_cp_u: return split_cp_fit(BaseBound::upper, cal_set, alpha);
    case MethodKind::sfd: return sfd_fit(train_set, cal_set, alpha);
    case MethodKind::cqr: return cqr_fit(cal_set, alpha);
    case MethodKind::cqr_r: return cqr_r_fit(cal_set, alpha);
    case MethodKind::cpul: return cpul_fit(train_set, cal_set, alpha);
    case MethodKind::cpul_omlt: {
      if (cal_set.size() < 2) throw Error("OMLT needs at least two calibration samples");
      if (!(config.reserved_fraction > 0.0 && config.reserved_fraction < 1.0)) {
        throw Error("reserved_fraction must lie in (0, 1)");
      }
      OmltConfig omlt;
      omlt.ell_grid = config.ell_grid;
      omlt.reserved_count = static_cast<std::size_t>(
          std::llround(config.reserved_fraction * static_cast<double>(cal_set.size())));
      omlt.reserved_count = std::clamp<std::size_t>(omlt.reserved_count, 1, cal_set.size() - 1);
      omlt.seed = seed;
      return omlt_fit(train_set, cal_set, alpha, omlt);
    }
  }
  throw Error("unhandled method");
}

Interval method_predict(const MethodModel& model, const BoundedSample& sample) {
  struct Visitor {
    const BoundedSample& s;
    Interval operator()(const SplitCpModel& m) const { return predict(m, s); }
    Interval operator()(const CalibratedModel& m) const { return predict(m, s); }
    Interval operator()(const CpulModel& m) const { return predict(m.selected_model(), s); }
    Interval operator()(const OmltModel& m) const { return predict(m.inner.selected_model(), s); }
  };
  return std::visit(Visitor{sample}, model);
}

}  // namespace cpul
