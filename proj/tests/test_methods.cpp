#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cpul/error.hpp"
#include "cpul/methods.hpp"
#include "cpul/omlt.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cpul;

namespace {

BoundedSample sample(double y, double b_lo, double b_hi) { return {{}, y, b_lo, b_hi}; }

// Samples whose residual y - b_lo takes the given values.
std::vector<BoundedSample> with_lower_residuals(const std::vector<double>& residuals) {
  std::vector<BoundedSample> out;
  for (double r : residuals) out.push_back(sample(10.0 + r, 10.0, 20.0));
  return out;
}

double coverage(const MethodModel& model, std::span<const BoundedSample> test) {
  std::size_t hit = 0;
  for (const auto& s : test) hit += method_predict(model, s).contains(s.y) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(test.size());
}

}  // namespace

TEST_CASE("split CP offsets follow the two-sided rank rule") {
  const auto cal = with_lower_residuals({0.9, 0.1, 0.5, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6});
  const auto m = split_cp_fit(BaseBound::lower, cal, 0.2);
  // floor(0.1 * 10) = 1 and ceil(0.9 * 10) = 9.
  CHECK(m.offset_lo == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(m.offset_hi == doctest::Approx(0.9).epsilon(1e-12));

  // Exhaustive count: offset_lo is the largest residual with at most
  // (alpha/2)(n+1) residuals at or below it; offset_hi the smallest with at least
  // (1 - alpha/2)(n+1) at or below.
  std::vector<double> r;
  for (const auto& s : cal) r.push_back(s.y - s.b_lo);
  const auto count_le = [&](double v) { return std::count_if(r.begin(), r.end(), [&](double x) { return x <= v; }); };
  CHECK(count_le(m.offset_lo) <= 1);
  CHECK(count_le(m.offset_hi) >= 9);
}

TEST_CASE("split CP with a vanishing lower rank clips to the bound pair") {
  const auto cal = with_lower_residuals({0.1, 0.2, 0.3, 0.4, 0.5});
  const auto m = split_cp_fit(BaseBound::lower, cal, 0.1);  // floor(0.05 * 6) = 0
  CHECK(m.offset_lo == -kInf);
  CHECK(predict(m, sample(10.2, 10.0, 20.0)).lo() == 10.0);
}

TEST_CASE("split CP on a perfect base is a point") {
  std::vector<BoundedSample> cal(30, sample(5.0, 5.0, 9.0));
  const auto m = split_cp_fit(BaseBound::lower, cal, 0.1);
  const auto c = predict(m, sample(6.0, 6.0, 8.0));
  CHECK(c == Interval(6.0, 6.0));
  CHECK(c.width() == 0.0);
}

TEST_CASE("method_predict dispatches split CP") {
  SplitCpModel m{BaseBound::lower, 0.1, 0.9, 0.2};
  const auto c = method_predict(MethodModel{m}, sample(5.5, 5.0, 6.5));
  CHECK(c.lo() == doctest::Approx(5.1).epsilon(1e-15));
  CHECK(c.hi() == doctest::Approx(5.9).epsilon(1e-15));
}

TEST_CASE("CQR with constant scores shrinks by the score") {
  // Score max(b_lo - y, y - b_hi) = -0.25 on every sample (exact in binary).
  std::vector<BoundedSample> cal(19, sample(1.0, 0.75, 1.25));
  const auto m = cqr_fit(cal, 0.1);
  CHECK(m.tau == -0.25);
  CHECK(predict(m, sample(3.0, 2.0, 4.0)) == Interval(2.25, 3.75));

  std::vector<BoundedSample> tenths(19, sample(1.0, 0.8, 1.2));
  const auto m2 = cqr_fit(tenths, 0.1);
  CHECK(m2.tau == doctest::Approx(-0.2).epsilon(1e-12));
  const auto c = predict(m2, sample(3.0, 2.0, 4.0));
  CHECK(c.lo() == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(c.hi() == doctest::Approx(3.8).epsilon(1e-12));
}

TEST_CASE("CQR at tau = 0 is the bound pair, and never leaves it") {
  const auto fam_model = CalibratedModel{
      std::make_shared<OffsetFamily>(EndpointRule{Anchor::lower_bound, 0},
                                     EndpointRule{Anchor::upper_bound, 0}, OffsetScaling::absolute, "cqr"),
      0.0, 0.1, true};
  CHECK(predict(fam_model, sample(1, 0.5, 2)) == Interval(0.5, 2));

  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<BoundedSample> cal(100);
    for (auto& s : cal) s = testing::random_sample(rng, 2.0);
    const auto m = cqr_fit(cal, rng.uniform(0.05, 0.3));
    CHECK(m.tau <= 0.0);
    for (int k = 0; k < 20; ++k) {
      const auto s = testing::random_sample(rng, 2.0);
      CHECK(predict(m, s).subset_of(Interval(s.b_lo, s.b_hi)));
      CHECK(m.family->evaluate(s, m.tau) == predict(m, s));  // strengthening never binds
    }
  }
}

TEST_CASE("CQR-r scales the offset by the bound gap") {
  const auto m0 = CalibratedModel{
      std::make_shared<OffsetFamily>(EndpointRule{Anchor::lower_bound, 0},
                                     EndpointRule{Anchor::upper_bound, 0}, OffsetScaling::relative, "cqr-r"),
      0.0, 0.1, true};
  CHECK(predict(m0, sample(1, 0.5, 2)) == Interval(0.5, 2));

  // Zero-gap samples score 0 and predict the point b_lo.
  const auto& fam = *m0.family;
  CHECK(fam.min_covering_t(sample(3.0, 3.0, 3.0)) == 0.0);
  const auto point = predict(CalibratedModel{m0.family, 0.7, 0.1, true}, sample(3, 3, 3));
  CHECK(point == Interval(3, 3));

  // Constant relative score -0.1: gap 10, y 1 unit inside each bound.
  std::vector<BoundedSample> cal;
  for (int i = 0; i < 19; ++i) cal.push_back(sample(5.0 + i, i, i + 10.0));
  for (auto& s : cal) s.y = s.b_lo + 1.0;
  for (auto& s : cal) s.b_hi = s.y + 9.0;  // y - b_hi = -9, b_lo - y = -1; score = -0.1
  const auto m = cqr_r_fit(cal, 0.1);
  CHECK(m.tau == doctest::Approx(-0.1).epsilon(1e-12));
  const auto c = predict(m, sample(0.5, 0.0, 4.0));
  CHECK(c.lo() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(c.hi() == doctest::Approx(3.6).epsilon(1e-12));
}

TEST_CASE("training residual quantiles") {
  const auto train = with_lower_residuals({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const auto q = cpul_residual_quantiles(train, 0.2);
  CHECK(q.q_l_lo == 1);
  CHECK(q.q_l_hi == 9);

  std::vector<BoundedSample> tight(10, sample(3.0, 3.0, 4.0));
  const auto qt = cpul_residual_quantiles(tight, 0.1);
  CHECK(qt.q_l_lo == 0);
  CHECK(qt.q_l_hi == 0);

  Rng rng(5);
  std::vector<BoundedSample> any(200);
  for (auto& s : any) s = testing::random_sample(rng, 3.0);
  const auto qa = cpul_residual_quantiles(any, 0.1);
  CHECK(qa.q_l_lo >= 0.0);
  CHECK(qa.q_u_hi <= 0.0);
  CHECK(qa.q_l_lo <= qa.q_l_hi);
  CHECK(qa.q_u_lo <= qa.q_u_hi);
  CHECK_THROWS_AS(cpul_residual_quantiles(std::vector<BoundedSample>{}, 0.1), Error);
}

TEST_CASE("CPUL variant families use the right endpoints") {
  const ResidualQuantiles q{0.1, 0.9, -0.8, -0.2, 0.2};
  const auto s = sample(5.0, 4.0, 6.0);
  CHECK(cpul_family(q, CpulVariant::ll)->evaluate(s, 0) == Interval(4.1, 4.9));
  CHECK(cpul_family(q, CpulVariant::lu)->evaluate(s, 0) == Interval(4.1, 5.8));
  CHECK(cpul_family(q, CpulVariant::ul)->evaluate(s, 0) == Interval(5.2, 4.9));
  CHECK(cpul_family(q, CpulVariant::uu)->evaluate(s, 0) == Interval(5.2, 5.8));
}

TEST_CASE("CPUL on degenerate data selects ll with zero width") {
  std::vector<BoundedSample> data(40, sample(7.0, 7.0, 7.0));
  const auto m = cpul_fit(data, data, 0.1);
  CHECK(m.selected == CpulVariant::ll);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m.tau[i] == 0.0);
    CHECK(m.mean_width[i] == 0.0);
  }
  CHECK(method_predict(MethodModel{m}, sample(3.0, 3.0, 3.0)) == Interval(3.0, 3.0));
}

TEST_CASE("variant selection is an argmin with lexicographic ties") {
  CHECK(select_narrowest({2, 3, 1, 2}) == CpulVariant::ul);
  CHECK(select_narrowest({1, 1, 1, 1}) == CpulVariant::ll);
  CHECK(select_narrowest({3, 2, 2, 2}) == CpulVariant::lu);
  CHECK(select_narrowest({3, 3, 3, 2}) == CpulVariant::uu);
}

TEST_CASE("CPUL selected width dominates every variant on heteroskedastic data") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = testing::heteroskedastic_set(1500, seed);
    const std::span<const BoundedSample> all(data);
    const auto m = cpul_fit(all.subspan(0, 500), all.subspan(500, 500), 0.1);
    // Recompute all four variants independently.
    const auto q = cpul_residual_quantiles(all.subspan(0, 500), 0.1);
    for (auto v : kCpulVariants) {
      const auto cal = calibrate(cpul_family(q, v), all.subspan(500, 500), 0.1);
      CHECK(m.mean_width[static_cast<std::size_t>(m.selected)] <=
            mean_width(cal, all.subspan(500, 500)));
    }
  }
}

TEST_CASE("SFD is the standalone ul variant") {
  const auto data = testing::heteroskedastic_set(600, 9);
  const std::span<const BoundedSample> all(data);
  const auto sfd = sfd_fit(all.subspan(0, 200), all.subspan(200, 200), 0.1);
  const auto cpul = cpul_fit(all.subspan(0, 200), all.subspan(200, 200), 0.1);
  const auto& ul = cpul.variants[static_cast<std::size_t>(CpulVariant::ul)];
  CHECK(sfd.tau == ul.tau);
  for (const auto& s : all.subspan(400)) CHECK(predict(sfd, s) == predict(ul, s));

  std::vector<BoundedSample> perfect(50, sample(2, 2, 2));
  const auto p = sfd_fit(perfect, perfect, 0.1);
  CHECK(predict(p, sample(4, 4, 4)).width() == 0.0);
}

TEST_CASE("OMLT wrapper semantics") {
  const ResidualQuantiles q{0.1, 0.9, -0.8, -0.2, 0.1};
  const auto inner = cpul_family(q, CpulVariant::lu);
  CHECK_THROWS_AS(omlt_wrap(inner, -1.0), Error);
  CHECK_THROWS_AS(omlt_wrap(std::make_shared<StrengthenedFamily>(inner), 1.0), Error);

  const auto zero = omlt_wrap(inner, 0.0);
  const StrengthenedFamily strong(inner);
  Rng rng(31);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto s = testing::random_sample(rng, 2.0);
    const double t = rng.uniform(-3, 3);
    CHECK(zero->evaluate(s, t) == strong.evaluate(s, t));
    CHECK(zero->min_covering_t(s) == strong.min_covering_t(s));
  }

  // Gap 0.5 below ell = 1: the bound pair for every t.
  const auto one = omlt_wrap(inner, 1.0);
  const auto tight = sample(5.2, 5.0, 5.5);
  for (double t : {-100.0, -1.0, 0.0, 3.0}) CHECK(one->evaluate(tight, t) == Interval(5.0, 5.5));
}

TEST_CASE("kappa bisection agrees with the closed form without truncation") {
  // Fixed endpoints U - L = 1, wide bounds, ell = 2 -> kappa = 0.5.
  const OffsetFamily fam(EndpointRule{Anchor::lower_bound, 10.0}, EndpointRule{Anchor::lower_bound, 11.0},
                         OffsetScaling::absolute, "fixed");
  const auto s = sample(10.5, 0.0, 100.0);
  CHECK(kappa_closed_form(10.0, 11.0, 2.0) == 0.5);
  CHECK(std::abs(kappa_bisection(fam, s, 2.0) - 0.5) <= 1e-9);
  CHECK(OmltFamily(std::make_shared<OffsetFamily>(fam), 2.0).kappa(s) == 0.5);
}

TEST_CASE("OMLT family keeps a width floor") {
  Rng rng(37);
  const ResidualQuantiles q{0.05, 0.4, -1.5, -0.1, 0.1};
  for (int rep = 0; rep < 2000; ++rep) {
    const auto v = kCpulVariants[rng.below(4)];
    const double ell = rng.uniform(0.0, 2.0);
    const auto fam = omlt_wrap(cpul_family(q, v), ell);
    const auto s = testing::random_sample(rng, 2.0);
    const double t = rng.uniform(-3.0, 3.0);
    const auto c = fam->evaluate(s, t);
    if (s.gap() <= ell) {
      CHECK(c == Interval(s.b_lo, s.b_hi));
    } else {
      CHECK(c.width() >= ell - 1e-9);
    }
  }
}

TEST_CASE("OMLT with the grid {0} reproduces CPUL on the remainder") {
  const auto data = testing::heteroskedastic_set(2000, 41);
  const std::span<const BoundedSample> all(data);
  const auto train = all.subspan(0, 800);
  const auto cal = all.subspan(800, 600);
  OmltConfig cfg{{0.0}, 200, 99};
  const auto omlt = omlt_fit(train, cal, 0.1, cfg);
  const auto split = split_reserved(cal, 200, 99);
  const auto cpul = cpul_fit(train, split.remainder, 0.1);
  CHECK(omlt.ell == 0.0);
  CHECK(omlt.inner.selected == cpul.selected);
  CHECK(omlt.inner.tau == cpul.tau);
  CHECK(omlt.inner.mean_width == cpul.mean_width);
  for (const auto& s : all.subspan(1400)) {
    CHECK(method_predict(MethodModel{omlt}, s) == method_predict(MethodModel{cpul}, s));
  }
}

TEST_CASE("OMLT grid search never loses to ell = 0 on the reserved set") {
  // Constant gap and constant residuals.
  std::vector<BoundedSample> data;
  Rng rng(43);
  for (int i = 0; i < 1200; ++i) {
    const double center = rng.uniform(50, 60);
    data.push_back(sample(center + 0.3, center, center + 1.0));
  }
  const std::span<const BoundedSample> all(data);
  OmltConfig cfg;
  cfg.reserved_count = 300;
  cfg.seed = 5;
  const auto model = omlt_fit(all.subspan(0, 400), all.subspan(400, 800), 0.1, cfg);
  CHECK(model.grid.front() == 0.0);
  const auto split = split_reserved(all.subspan(400, 800), 300, 5);
  const auto q = cpul_residual_quantiles(all.subspan(0, 400), 0.1);
  for (auto v : kCpulVariants) {
    const auto idx = static_cast<std::size_t>(v);
    const auto chosen = calibrate(omlt_wrap(cpul_family(q, v), model.variant_ell[idx]), split.reserved, 0.1);
    const auto zero = calibrate(omlt_wrap(cpul_family(q, v), 0.0), split.reserved, 0.1);
    CHECK(mean_width(chosen, split.reserved) <= mean_width(zero, split.reserved));
  }
}

TEST_CASE("OMLT rejects an oversized reserved portion") {
  const auto data = testing::heteroskedastic_set(100, 1);
  OmltConfig cfg;
  cfg.reserved_count = 50;
  CHECK_THROWS_AS(omlt_fit(data, std::span<const BoundedSample>(data).subspan(0, 50), 0.1, cfg), Error);
}

TEST_CASE("method names") {
  for (auto k : kAllMethods) CHECK(parse_method(to_string(k)) == k);
  CHECK_THROWS_AS(parse_method("bogus"), UsageError);
  try {
    parse_method("bogus");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("cpul-omlt") != std::string::npos);
  }
}

TEST_CASE("held-out coverage over seeded repeats") {
  // 10 repeats, 1000 calibration and 1000 test samples; each method's mean
  // coverage must clear 1 - alpha - 1.5%.
  for (double alpha : {0.1, 0.2}) {
    for (auto kind : kAllMethods) {
      double total = 0.0;
      for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const auto data = testing::heteroskedastic_set(3000, 100 + rep);
        const std::span<const BoundedSample> all(data);
        const auto model = fit_method({kind, 0.2, {}}, all.subspan(0, 1000), all.subspan(1000, 1000), alpha, rep);
        total += coverage(model, all.subspan(2000, 1000));
      }
      INFO(to_string(kind), " alpha=", alpha);
      CHECK(total / 10.0 >= 1.0 - alpha - 0.015);
    }
  }
}
