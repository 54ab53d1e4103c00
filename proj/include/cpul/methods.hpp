#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpul/calibration.hpp"
#include "cpul/omlt.hpp"

namespace cpul {

enum class BaseBound { lower, upper };

// Split CP around a single bound predictor: [B(x) + offset_lo, B(x) + offset_hi],
// strengthened. Offsets are order statistics of the signed calibration
// residuals y - B(x); a rank of 0 (resp. > n) gives -inf (resp. +inf).
struct SplitCpModel {
  BaseBound base = BaseBound::lower;
  double offset_lo = -kInf;
  double offset_hi = kInf;
  double alpha = 0.1;
};

SplitCpModel split_cp_fit(BaseBound base, std::span<const BoundedSample> cal_set, double alpha);
Interval predict(const SplitCpModel& model, const BoundedSample& sample);

// CQR with the bound pair standing in for the quantile regressors.
CalibratedModel cqr_fit(std::span<const BoundedSample> cal_set, double alpha);
// CQR with offsets scaled by the bound gap.
CalibratedModel cqr_r_fit(std::span<const BoundedSample> cal_set, double alpha);

// Quantiles of the training residuals y - b_lo (l) and y - b_hi (u) at
// levels alpha/2 and 1 - alpha/2.
struct ResidualQuantiles {
  double q_l_lo = 0.0;
  double q_l_hi = 0.0;
  double q_u_lo = 0.0;
  double q_u_hi = 0.0;
  double alpha = 0.1;
};

ResidualQuantiles cpul_residual_quantiles(std::span<const BoundedSample> train_set, double alpha);

enum class CpulVariant { ll = 0, lu = 1, ul = 2, uu = 3 };
inline constexpr std::array<CpulVariant, 4> kCpulVariants{CpulVariant::ll, CpulVariant::lu,
                                                          CpulVariant::ul, CpulVariant::uu};
std::string_view to_string(CpulVariant v);

// Quantile-shifted offset family for one variant, e.g. ul is
// [b_hi + q_u_lo - t, b_lo + q_l_hi + t].
std::shared_ptr<const OffsetFamily> cpul_family(const ResidualQuantiles& q, CpulVariant variant);

// SFD CP as used in the benchmarks: the ul family calibrated on its own.
CalibratedModel sfd_fit(std::span<const BoundedSample> train_set,
                        std::span<const BoundedSample> cal_set, double alpha);

struct CpulModel {
  ResidualQuantiles quantiles;
  CpulVariant selected = CpulVariant::ll;
  std::array<CalibratedModel, 4> variants;
  std::array<double, 4> tau{};
  std::array<double, 4> mean_width{};

  const CalibratedModel& selected_model() const {
    return variants[static_cast<std::size_t>(selected)];
  }
};

// Index of the smallest width; ties go to the earliest (ll < lu < ul < uu).
CpulVariant select_narrowest(const std::array<double, 4>& widths);

// Calibrates the four given families on `cal_set` and keeps the one with the
// smallest mean strengthened width.
CpulModel cpul_select(const ResidualQuantiles& q, const std::array<FamilyPtr, 4>& families,
                      std::span<const BoundedSample> cal_set, double alpha);

CpulModel cpul_fit(std::span<const BoundedSample> train_set,
                   std::span<const BoundedSample> cal_set, double alpha);

struct OmltConfig {
  // Empty means the default grid built from the reserved samples.
  std::vector<double> ell_grid;
  std::size_t reserved_count = 1000;
  std::uint64_t seed = 0;
};

struct OmltModel {
  double ell = 0.0;                  // threshold of the selected variant
  std::array<double, 4> variant_ell{};  // threshold chosen per variant
  CpulModel inner;                   // wrapped families, calibrated on the remainder
  double reserved_fraction = 0.0;
  std::vector<double> grid;          // grid actually searched
};

// {0} plus the bound-gap quantiles of `reserved` at 24 levels equally spaced
// over [2%, 50%]; sorted, duplicates removed.
std::vector<double> default_ell_grid(std::span<const BoundedSample> reserved);

OmltModel omlt_fit(std::span<const BoundedSample> train_set,
                   std::span<const BoundedSample> cal_set, double alpha, const OmltConfig& config);

// The samples omlt_fit reserves for the grid search, and the remainder.
struct CalibrationSplit {
  std::vector<BoundedSample> reserved;
  std::vector<BoundedSample> remainder;
};
CalibrationSplit split_reserved(std::span<const BoundedSample> cal_set, std::size_t reserved_count,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Uniform method handling.

enum class MethodKind { split_cp_l, split_cp_u, sfd, cqr, cqr_r, cpul, cpul_omlt };
inline constexpr std::array<MethodKind, 7> kAllMethods{
    MethodKind::split_cp_l, MethodKind::split_cp_u, MethodKind::sfd,      MethodKind::cqr,
    MethodKind::cqr_r,      MethodKind::cpul,       MethodKind::cpul_omlt};

std::string_view to_string(MethodKind kind);
// Throws cpul::UsageError listing the valid names on unknown input.
MethodKind parse_method(std::string_view name);

struct MethodConfig {
  MethodKind kind = MethodKind::cpul;
  double reserved_fraction = 0.2;  // OMLT only
  std::vector<double> ell_grid;    // OMLT only; empty = default grid
};

using MethodModel = std::variant<SplitCpModel, CalibratedModel, CpulModel, OmltModel>;

MethodModel fit_method(const MethodConfig& config, std::span<const BoundedSample> train_set,
                       std::span<const BoundedSample> cal_set, double alpha, std::uint64_t seed);

Interval method_predict(const MethodModel& model, const BoundedSample& sample);

}  // namespace cpul
