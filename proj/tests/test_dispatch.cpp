#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "cpul/dispatch/economic_dispatch.hpp"
#include "cpul/dispatch/grid_case.hpp"
#include "cpul/dispatch/lp_solver.hpp"
#include "cpul/dispatch/ptdf.hpp"
#include "cpul/error.hpp"
#include "dispatch_support.hpp"
#include "doctest.h"

using namespace cpul;
using namespace cpul::dispatch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LpProblem box_lp(Eigen::VectorXd c, Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd lo,
                 Eigen::VectorXd hi) {
  return {std::move(c), std::move(a), std::move(b), std::move(lo), std::move(hi)};
}

// Vertex enumeration oracle for box-bounded LPs: every basic solution fixes
// n - m variables at a bound and solves for the rest.
double brute_force_min(const LpProblem& lp, bool& feasible) {
  const auto n = lp.c.size();
  const auto m = lp.b_eq.size();
  double best = kInf;
  feasible = false;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    std::vector<Eigen::Index> basic;
    std::vector<Eigen::Index> fixed;
    for (Eigen::Index j = 0; j < n; ++j) ((mask >> j) & 1u ? basic : fixed).push_back(j);
    for (unsigned bounds = 0; bounds < (1u << fixed.size()); ++bounds) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (std::size_t k = 0; k < fixed.size(); ++k) {
        x[fixed[k]] = (bounds >> k) & 1u ? lp.upper[fixed[k]] : lp.lower[fixed[k]];
      }
      Eigen::MatrixXd b(m, m);
      for (Eigen::Index i = 0; i < m; ++i) b.col(i) = lp.a_eq.col(basic[i]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
      if (!lu.isInvertible()) continue;
      Eigen::VectorXd rhs = lp.b_eq - lp.a_eq * x;
      const Eigen::VectorXd xb = lu.solve(rhs);
      bool ok = true;
      for (Eigen::Index i = 0; i < m; ++i) {
        x[basic[i]] = xb[i];
        ok = ok && xb[i] >= lp.lower[basic[i]] - 1e-9 && xb[i] <= lp.upper[basic[i]] + 1e-9;
      }
      if (!ok) continue;
      feasible = true;
      best = std::min(best, lp.c.dot(x));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("lp_solve small cases") {
  using V = Eigen::VectorXd;
  {
    const auto r = lp_solve(box_lp(V::Constant(1, 1.0), Eigen::MatrixXd(0, 1), V(0),
                                   V::Constant(1, 1.0), V::Constant(1, 2.0)));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.x[0] == doctest::Approx(1.0));
  }
  {
    const auto r = lp_solve(box_lp(V::Constant(1, 1.0), Eigen::MatrixXd(0, 1), V(0),
                                   V::Constant(1, 2.0), V::Constant(1, 1.0)));
    CHECK(r.status == LpStatus::infeasible);
  }
  {
    Eigen::MatrixXd a(1, 2);
    a << 1, 1;
    const auto lp = box_lp(Eigen::Vector2d(1, 2), a, V::Constant(1, 3.0), V::Zero(2), V::Constant(2, 2.0));
    const auto r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.x[0] == doctest::Approx(2.0));
    CHECK(r.x[1] == doctest::Approx(1.0));
    CHECK(r.objective == doctest::Approx(4.0));
    bool feasible = false;
    CHECK(brute_force_min(lp, feasible) == doctest::Approx(4.0));
    CHECK(r.duals[0] == doctest::Approx(2.0));
  }
  {
    Eigen::MatrixXd a(1, 2);
    a << 1, 1;
    const auto r = lp_solve(box_lp(Eigen::Vector2d(1, 2), a, V::Constant(1, 5.0), V::Zero(2), V::Constant(2, 2.0)));
    CHECK(r.status == LpStatus::infeasible);
  }
  {
    Eigen::MatrixXd a(1, 2);
    a << 1, -1;
    const auto r = lp_solve(box_lp(Eigen::Vector2d(-1, 0), a, V::Zero(1), V::Zero(2), V::Constant(2, kInf)));
    CHECK(r.status == LpStatus::unbounded);
  }
  CHECK_THROWS_AS(lp_solve(box_lp(V::Zero(2), Eigen::MatrixXd(1, 3), V::Zero(1), V::Zero(2), V::Zero(2))), Error);
}

TEST_CASE("lp_solve matches vertex enumeration and closes the duality gap") {
  Rng rng(101);
  int optimal = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.below(4));
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
    LpProblem lp;
    lp.c.resize(n);
    lp.lower.resize(n);
    lp.upper.resize(n);
    lp.a_eq.resize(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      lp.c[j] = std::round(rng.uniform(-5, 5));
      lp.lower[j] = std::round(rng.uniform(-3, 0));
      lp.upper[j] = lp.lower[j] + std::round(rng.uniform(0, 4));
      for (Eigen::Index i = 0; i < m; ++i) lp.a_eq(i, j) = std::round(rng.uniform(-3, 3));
    }
    // Right-hand side from a random point in the box, usually feasible.
    Eigen::VectorXd x0(n);
    for (Eigen::Index j = 0; j < n; ++j) x0[j] = rng.uniform(lp.lower[j], lp.upper[j]);
    lp.b_eq = lp.a_eq * x0;
    if (rep % 10 == 0) lp.b_eq[0] += 100.0;  // some infeasible ones
    if (Eigen::FullPivLU<Eigen::MatrixXd>(lp.a_eq).rank() < m) continue;  // oracle needs full row rank

    bool feasible = false;
    const double oracle = brute_force_min(lp, feasible);
    const auto r = lp_solve(lp);
    if (!feasible) {
      CHECK(r.status == LpStatus::infeasible);
      continue;
    }
    REQUIRE(r.status == LpStatus::optimal);
    ++optimal;
    CHECK(r.objective == doctest::Approx(oracle).epsilon(1e-9));
    CHECK((lp.a_eq * r.x - lp.b_eq).cwiseAbs().maxCoeff() <= 1e-9);
    // Dual objective b'y + sum_j d_j x_j with nonbasic x at bounds.
    double dual = lp.b_eq.dot(r.duals);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (r.reduced_costs[j] > 1e-9) {
        CHECK(r.x[j] == doctest::Approx(lp.lower[j]));
        dual += r.reduced_costs[j] * lp.lower[j];
      } else if (r.reduced_costs[j] < -1e-9) {
        CHECK(r.x[j] == doctest::Approx(lp.upper[j]));
        dual += r.reduced_costs[j] * lp.upper[j];
      }
    }
    CHECK(dual == doctest::Approx(r.objective).epsilon(1e-9));
  }
  CHECK(optimal > 100);
}

TEST_CASE("PTDF closed forms") {
  const auto two = compute_ptdf(2, {{0, 1, 3.0}}, 0);
  CHECK(two(0, 1) == doctest::Approx(-1.0));
  CHECK(two(0, 0) == 0.0);

  // Equal-susceptance triangle: injection at bus 1 splits 2/3 direct, 1/3 around.
  const auto tri = compute_ptdf(3, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}, 0);
  CHECK(tri(0, 1) == doctest::Approx(-2.0 / 3.0));
  CHECK(tri(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(tri(2, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(tri(0, 2) == doctest::Approx(-1.0 / 3.0));
  CHECK(tri(1, 2) == doctest::Approx(-1.0 / 3.0));
  CHECK(tri(2, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(tri.col(0).isZero());

  CHECK_THROWS_WITH_AS(compute_ptdf(4, {{0, 1, 1.0}, {2, 3, 1.0}}, 0), "disconnected network", Error);
  CHECK_THROWS_AS(compute_ptdf(1, {}, 0), Error);
}

TEST_CASE("PTDF flows of balanced injections do not depend on the slack bus") {
  Rng rng(5);
  for (auto topo : {Topology::ring, Topology::star, Topology::random_tree_plus_chords}) {
    CaseSpec spec;
    spec.n_bus = 7;
    spec.topology = topo;
    spec.seed = 3;
    const auto g = build_case(spec);
    for (std::size_t slack = 1; slack < g.n_bus; ++slack) {
      const auto other = compute_ptdf(g.n_bus, g.lines, slack);
      Eigen::VectorXd inj(static_cast<Eigen::Index>(g.n_bus));
      for (Eigen::Index i = 0; i < inj.size(); ++i) inj[i] = rng.uniform(-10, 10);
      inj.array() -= inj.mean();
      CHECK((g.ptdf * inj - other * inj).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("build_case invariants and determinism") {
  for (auto topo : {Topology::ring, Topology::star, Topology::random_tree_plus_chords}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      CaseSpec spec;
      spec.n_bus = 6;
      spec.topology = topo;
      spec.seed = seed;
      const auto a = build_case(spec);
      const auto b = build_case(spec);
      CHECK(a.ptdf == b.ptdf);
      CHECK(a.c == b.c);
      CHECK(a.f_max == b.f_max);
      CHECK(a.d0 == b.d0);
      CHECK(a.p_max.sum() >= 1.2 * a.d0.sum());
      CHECK(a.big_m == 100.0 * a.c.maxCoeff());
      validate_case(a);

      const auto nominal = solve_dispatch(a, a.d0);
      CHECK(nominal.primal.xi.cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
  CaseSpec bad;
  bad.n_bus = 1;
  CHECK_THROWS_WITH_AS(build_case(bad), "need >= 2 buses", Error);
  bad.n_bus = 4;
  bad.n_gen = 0;
  CHECK_THROWS_AS(build_case(bad), Error);
  CHECK_THROWS_AS(parse_topology("mesh"), UsageError);
}

TEST_CASE("dispatch on the two-generator case") {
  const auto g = cpul::testing::two_generator_case(3.0);
  const auto sol = solve_dispatch(g, g.d0);
  CHECK(sol.primal.p[0] == doctest::Approx(2.0));
  CHECK(sol.primal.p[1] == doctest::Approx(1.0));
  CHECK(sol.primal.objective == doctest::Approx(4.0));
  CHECK(sol.dual.lambda == doctest::Approx(2.0));
  CHECK(sol.dual.objective == doctest::Approx(4.0));
  // z = c - lambda e = (-1, 0): an upper-bound multiplier on the cheap unit.
  CHECK(sol.dual.z_hi[0] == doctest::Approx(1.0));
  CHECK(sol.dual.z_lo[0] == 0.0);
  CHECK(sol.dual.z_hi[1] == doctest::Approx(0.0));
  CHECK_FALSE(sol.congested);

  const auto zero = solve_dispatch(g, Eigen::VectorXd::Zero(1));
  CHECK(zero.primal.p.isZero());
  CHECK(zero.primal.objective == 0.0);

  CHECK_THROWS_WITH_AS(solve_dispatch(g, Eigen::VectorXd::Constant(1, 5.0)), "infeasible demand", Error);
}

TEST_CASE("objective evaluators") {
  const auto g = cpul::testing::two_generator_case(3.0);
  CHECK(primal_objective(g, Eigen::Vector2d(2, 1), Eigen::VectorXd::Zero(1)) == 4.0);
  DualSolution zero{0.0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
                    Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1), 0.0};
  CHECK(dual_objective(g, g.d0, zero) == 0.0);
}

TEST_CASE("strong duality and feasibility on congested random cases") {
  int congested = 0;
  int total = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    CaseSpec spec;
    spec.n_bus = 6;
    spec.topology = Topology::random_tree_plus_chords;
    spec.seed = seed;
    const auto g = build_case(spec);
    Rng rng(seed, 77);
    for (int k = 0; k < 100; ++k) {
      const auto load = sample_loads(g, kDefaultGlobalRange, kDefaultLocalRange, rng);
      const auto sol = solve_dispatch(g, load.d);
      const double scale = std::max(1.0, std::abs(sol.primal.objective));
      CHECK(std::abs(sol.primal.objective - sol.dual.objective) <= 1e-7 * scale);
      CHECK(primal_infeasibility(g, load.d, sol.primal) <= 1e-8 * scale);
      CHECK(dual_infeasibility(g, sol.dual) <= 1e-8 * scale);
      congested += sol.congested ? 1 : 0;
      ++total;
    }
  }
  const double fraction = static_cast<double>(congested) / total;
  MESSAGE("congested fraction: ", fraction);
  CHECK(fraction >= 0.1);
  CHECK(fraction <= 0.3);
}

TEST_CASE("load sampling") {
  const auto g = cpul::testing::two_generator_case(3.0);
  Rng rng(9);
  const auto same = sample_loads(g, {1, 1}, {1, 1}, rng);
  CHECK(same.d == g.d0);

  double sum = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const auto s = sample_loads(g, kDefaultGlobalRange, kDefaultLocalRange, rng);
    CHECK(s.d[0] == s.alpha_factor * s.beta_factors[0] * g.d0[0]);
    sum += s.alpha_factor;
  }
  const double sigma = 0.4 / std::sqrt(12.0);
  CHECK(std::abs(sum / kDraws - 0.8) <= 3.0 * sigma / std::sqrt(kDraws));
  CHECK(kDefaultGlobalRange.lo == 0.6);
  CHECK(kDefaultGlobalRange.hi == 1.0);
  CHECK(kDefaultLocalRange.lo == 0.85);
  CHECK(kDefaultLocalRange.hi == 1.15);
  CHECK_THROWS_AS(sample_loads(g, {0.0, 1.0}, {1, 1}, rng), Error);
}
