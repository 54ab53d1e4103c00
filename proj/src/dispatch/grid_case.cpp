#include "cpul/dispatch/grid_case.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "cpul/error.hpp"
#include "cpul/random.hpp"

namespace cpul::dispatch {
namespace {

std::vector<Line> make_lines(const CaseSpec& spec, Rng& rng) {
  const std::size_t n = spec.n_bus;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  switch (spec.topology) {
    case Topology::ring:
      for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      if (n > 2) edges.emplace_back(n - 1, 0);
      break;
    case Topology::star:
      for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case Topology::random_tree_plus_chords: {
      std::set<std::pair<std::size_t, std::size_t>> seen;
      for (std::size_t i = 1; i < n; ++i) {
        const auto parent = static_cast<std::size_t>(rng.below(i));
        edges.emplace_back(parent, i);
        seen.emplace(parent, i);
      }
      const std::size_t chords = n / 2;
      for (std::size_t attempt = 0, added = 0; added < chords && attempt < 50 * n; ++attempt) {
        auto a = static_cast<std::size_t>(rng.below(n));
        auto b = static_cast<std::size_t>(rng.below(n));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (!seen.emplace(a, b).second) continue;
        edges.emplace_back(a, b);
        ++added;
      }
      break;
    }
  }
  std::vector<Line> lines;
  lines.reserve(edges.size());
  for (auto [a, b] : edges) lines.push_back({a, b, rng.uniform(5.0, 20.0)});
  return lines;
}

Eigen::MatrixXd incidence(std::size_t n_bus, const std::vector<std::size_t>& buses) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_bus),
                                            static_cast<Eigen::Index>(buses.size()));
  for (std::size_t k = 0; k < buses.size(); ++k) {
    a(static_cast<Eigen::Index>(buses[k]), static_cast<Eigen::Index>(k)) = 1.0;
  }
  return a;
}

// Cheapest-first dispatch ignoring the network.
Eigen::VectorXd merit_order(const GridCase& g, double demand) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(g.n_gen));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return g.c[a] < g.c[b]; });
  Eigen::VectorXd p = g.p_min;
  double remaining = demand - p.sum();
  for (auto k : order) {
    const double add = std::clamp(remaining, 0.0, g.p_max[k] - g.p_min[k]);
    p[k] += add;
    remaining -= add;
  }
  return p;
}

}  // namespace

std::string_view to_string(Topology topology) {
  switch (topology) {
    case Topology::ring: return "ring";
    case Topology::star: return "star";
    case Topology::random_tree_plus_chords: return "random-tree-plus-chords";
  }
  return "?";
}

Topology parse_topology(std::string_view name) {
  for (auto t : {Topology::ring, Topology::star, Topology::random_tree_plus_chords}) {
    if (to_string(t) == name) return t;
  }
  throw UsageError("unknown topology '" + std::string(name) +
                   "'; valid: ring, star, random-tree-plus-chords");
}

void validate_case(const GridCase& g) {
  const auto G = static_cast<Eigen::Index>(g.n_gen);
  const auto D = static_cast<Eigen::Index>(g.n_load);
  const auto E = static_cast<Eigen::Index>(g.n_line);
  const auto N = static_cast<Eigen::Index>(g.n_bus);
  if (g.n_bus < 2) throw Error("need >= 2 buses");
  if (g.n_gen == 0) throw Error("case has no generators");
  if (g.n_load == 0) throw Error("case has no loads");
  if (g.c.size() != G || g.p_min.size() != G || g.p_max.size() != G || g.f_min.size() != E ||
      g.f_max.size() != E || g.d0.size() != D || g.ptdf.rows() != E || g.ptdf.cols() != N ||
      g.a_gen.rows() != N || g.a_gen.cols() != G || g.a_load.rows() != N ||
      g.a_load.cols() != D || g.lines.size() != g.n_line) {
    throw Error("case dimensions are inconsistent");
  }
  if ((g.p_min.array() > g.p_max.array()).any()) throw Error("p_min exceeds p_max");
  if ((g.f_min.array() > g.f_max.array()).any()) throw Error("f_min exceeds f_max");
  if (!(g.big_m > g.c.maxCoeff())) throw Error("big_m must exceed every marginal cost");
  for (const auto* a : {&g.a_gen, &g.a_load}) {
    for (Eigen::Index k = 0; k < a->cols(); ++k) {
      const auto col = a->col(k);
      if ((col.array() != 0.0).count() != 1 || col.sum() != 1.0) {
        throw Error("incidence columns must hold exactly one 1");
      }
    }
  }
}

GridCase build_case(const CaseSpec& spec) {
  if (spec.n_bus < 2) throw Error("need >= 2 buses");
  if (spec.capacity_margin < 1.2) throw Error("capacity_margin must be >= 1.2");
  if (!(spec.congestion_target >= 0.0 && spec.congestion_target < 1.0)) {
    throw Error("congestion_target must lie in [0, 1)");
  }
  const std::size_t n_gen =
      spec.n_gen.value_or(std::min(spec.n_bus, std::max<std::size_t>(2, spec.n_bus / 2)));
  const std::size_t n_load = spec.n_load.value_or(spec.n_bus);
  if (n_gen == 0) throw Error("case has no generators");
  if (n_load == 0) throw Error("case has no loads");

  Rng rng(spec.seed, 0);
  GridCase g;
  g.n_bus = spec.n_bus;
  g.n_gen = n_gen;
  g.n_load = n_load;
  g.lines = make_lines(spec, rng);
  g.n_line = g.lines.size();
  g.slack_bus = 0;
  g.ptdf = compute_ptdf(g.n_bus, g.lines, g.slack_bus);

  // Generators on distinct buses while they last, loads round-robin.
  std::vector<std::size_t> bus_order(spec.n_bus);
  std::iota(bus_order.begin(), bus_order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(bus_order));
  std::vector<std::size_t> gen_bus(n_gen);
  for (std::size_t k = 0; k < n_gen; ++k) gen_bus[k] = bus_order[k % spec.n_bus];
  std::vector<std::size_t> load_bus(n_load);
  for (std::size_t k = 0; k < n_load; ++k) load_bus[k] = k % spec.n_bus;
  g.a_gen = incidence(g.n_bus, gen_bus);
  g.a_load = incidence(g.n_bus, load_bus);

  const auto G = static_cast<Eigen::Index>(n_gen);
  const auto D = static_cast<Eigen::Index>(n_load);
  g.d0.resize(D);
  for (Eigen::Index l = 0; l < D; ++l) g.d0[l] = rng.uniform(20.0, 100.0);
  g.c.resize(G);
  for (Eigen::Index k = 0; k < G; ++k) g.c[k] = rng.uniform(10.0, 50.0);
  Eigen::VectorXd share(G);
  for (Eigen::Index k = 0; k < G; ++k) share[k] = rng.uniform(0.5, 1.5);
  share /= share.sum();
  g.p_min = Eigen::VectorXd::Zero(G);
  g.p_max = share * (spec.capacity_margin * g.d0.sum());
  g.big_m = 100.0 * g.c.maxCoeff();

  // Line limits. Unconstrained merit-order flows are computed for a batch of
  // load draws; limits are a common fraction of each line's largest flow,
  // with the fraction picked so about congestion_target of the draws would
  // overload some line. Limits never drop below what a proportional dispatch
  // of the nominal load needs, so the nominal instance has no violations.
  const auto E = static_cast<Eigen::Index>(g.n_line);
  const Eigen::MatrixXd ptdf_gen = g.ptdf * g.a_gen;
  const Eigen::MatrixXd ptdf_load = g.ptdf * g.a_load;
  const Eigen::VectorXd p_prop = g.p_max * (g.d0.sum() / g.p_max.sum());
  const Eigen::VectorXd f_prop = ptdf_gen * p_prop - ptdf_load * g.d0;

  constexpr int kDraws = 400;
  Rng draws(spec.seed, 1);
  Eigen::MatrixXd flows(E, kDraws);
  for (int k = 0; k < kDraws; ++k) {
    const double alpha = draws.uniform(0.6, 1.0);
    Eigen::VectorXd d(D);
    for (Eigen::Index l = 0; l < D; ++l) d[l] = alpha * draws.uniform(0.85, 1.15) * g.d0[l];
    flows.col(k) = (ptdf_gen * merit_order(g, d.sum()) - ptdf_load * d).cwiseAbs();
  }
  const Eigen::VectorXd peak = flows.rowwise().maxCoeff();
  Eigen::VectorXd jitter(E);
  for (Eigen::Index e = 0; e < E; ++e) jitter[e] = rng.uniform(0.9, 1.1);
  const double floor = 0.05 * peak.mean() + 1.0;
  auto limits = [&](double scale) {
    Eigen::VectorXd f(E);
    for (Eigen::Index e = 0; e < E; ++e) {
      f[e] = std::max({scale * jitter[e] * peak[e], 1.05 * std::abs(f_prop[e]), floor});
    }
    return f;
  };
  auto congested_fraction = [&](const Eigen::VectorXd& f) {
    int hit = 0;
    for (int k = 0; k < kDraws; ++k) hit += (flows.col(k).array() > f.array()).any() ? 1 : 0;
    return static_cast<double>(hit) / kDraws;
  };
  double lo = 0.0;
  double hi = 1.2;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (congested_fraction(limits(mid)) > spec.congestion_target ? lo : hi) = mid;
  }
  g.f_max = limits(hi);
  g.f_min = -g.f_max;
  validate_case(g);
  return g;
}

}  // namespace cpul::dispatch
