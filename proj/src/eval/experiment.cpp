#include "cpul/eval/experiment.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "cpul/error.hpp"
#include "cpul/eval/metrics.hpp"
#include "cpul/eval/parallel.hpp"
#include "cpul/proxies/proxies.hpp"
#include "cpul/random.hpp"

namespace cpul::eval {
namespace {

constexpr int kMaxDrawAttempts = 100;

std::vector<BoundedSample> pick(const std::vector<BoundedSample>& all,
                                const std::vector<std::size_t>& order, std::size_t from,
                                std::size_t count) {
  std::vector<BoundedSample> out;
  out.reserve(count);
  for (std::size_t k = from; k < from + count; ++k) out.push_back(all[order[k]]);
  return out;
}

struct RepeatOutcome {
  std::vector<double> picp;
  std::vector<double> length;
  std::vector<std::size_t> excluded;
};

}  // namespace

void validate_config(const ExperimentConfig& c) {
  if (c.n_repeats < 1) throw Error("n_repeats must be >= 1");
  if (c.n_train < 1 || c.n_cal < 1 || c.n_test < 1) {
    throw Error("n_train, n_cal and n_test must all be >= 1");
  }
  if (c.alphas.empty()) throw Error("no alpha values configured");
  for (double a : c.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw Error("alpha must lie in (0, 1)");
  }
  for (const auto& m : resolved_methods(c)) {
    if (m.kind == MethodKind::cpul_omlt) {
      if (!(m.reserved_fraction > 0.0 && m.reserved_fraction < 1.0)) {
        throw Error("reserved_fraction must lie in (0, 1)");
      }
      if (c.n_cal < 2) throw Error("cpul-omlt needs n_cal >= 2");
    }
  }
  const std::size_t need = c.n_train + c.n_cal + c.n_test;
  if (c.generator) {
    dispatch::validate_case(c.generator->grid);
    if (!(c.generator->primal_regularization >= 0.0 && c.generator->dual_regularization >= 0.0)) {
      throw Error("regularization must be >= 0");
    }
    for (auto r : {c.generator->global, c.generator->local}) {
      if (!(r.lo > 0.0 && r.lo <= r.hi)) throw Error("factor ranges must be positive with lo <= hi");
    }
  } else if (c.dataset.size() < need) {
    throw Error("insufficient samples: dataset has " + std::to_string(c.dataset.size()) +
                ", splits need " + std::to_string(need));
  }
}

std::vector<MethodConfig> resolved_methods(const ExperimentConfig& config) {
  if (!config.methods.empty()) return config.methods;
  std::vector<MethodConfig> all;
  for (auto k : kAllMethods) all.push_back({k, 0.2, {}});
  return all;
}

Eigen::VectorXd draw_load(const GeneratorSource& source, std::size_t index) {
  const auto& g = source.grid;
  Rng rng(source.data_seed, index);
  for (int attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
    const auto s = dispatch::sample_loads(g, source.global, source.local, rng);
    const double total = s.d.sum();
    if (total >= g.p_min.sum() && total <= g.p_max.sum()) return s.d;
  }
  throw Error("sample " + std::to_string(index) + ": infeasible demand after " +
              std::to_string(kMaxDrawAttempts) + " attempts");
}

LoadPool build_pool(const GeneratorSource& source, std::size_t n, unsigned jobs) {
  LoadPool pool;
  pool.loads.resize(n);
  pool.labels.resize(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    pool.loads[i] = draw_load(source, i);
    pool.labels[i] = dispatch::solve_dispatch(source.grid, pool.loads[i]);
  });
  return pool;
}

ExperimentData::ExperimentData(const ExperimentConfig& config) : config_(config) {
  validate_config(config_);
  if (config_.generator) {
    pool_ = build_pool(*config_.generator, config_.n_train + config_.n_cal + config_.n_test,
                       config_.jobs);
  }
}

std::size_t ExperimentData::size() const {
  return config_.generator ? pool_.loads.size() : config_.dataset.size();
}

RepeatData ExperimentData::repeat(std::size_t r) const {
  const auto order = shuffled_indices(size(), config_.base_seed + r);
  const std::size_t n_tr = config_.n_train;
  const std::size_t n_ca = config_.n_cal;
  const std::size_t n_te = config_.n_test;
  RepeatData out;
  if (!config_.generator) {
    out.train = pick(config_.dataset, order, 0, n_tr);
    out.cal = pick(config_.dataset, order, n_tr, n_ca);
    out.test = pick(config_.dataset, order, n_tr + n_ca, n_te);
    return out;
  }

  const auto& src = *config_.generator;
  std::vector<Eigen::VectorXd> train_loads;
  std::vector<dispatch::DispatchSolution> train_labels;
  for (std::size_t k = 0; k < n_tr; ++k) {
    train_loads.push_back(pool_.loads[order[k]]);
    train_labels.push_back(pool_.labels[order[k]]);
  }
  const auto primal =
      proxies::fit_primal_proxy(src.grid, train_loads, train_labels, src.primal_regularization);
  const auto dual =
      proxies::fit_dual_proxy(src.grid, train_loads, train_labels, src.dual_regularization);

  auto emit = [&](std::size_t from, std::size_t count) {
    std::vector<Eigen::VectorXd> loads;
    std::vector<double> objectives;
    for (std::size_t k = from; k < from + count; ++k) {
      loads.push_back(pool_.loads[order[k]]);
      objectives.push_back(pool_.labels[order[k]].primal.objective);
    }
    return proxies::make_bounded_samples(src.grid, loads, objectives, primal, dual);
  };
  out.train = emit(0, n_tr);
  out.cal = emit(n_tr, n_ca);
  out.test = emit(n_tr + n_ca, n_te);
  return out;
}

std::uint64_t method_seed(const ExperimentConfig& config, std::size_t r) {
  return derive_seed(config.base_seed + r, 1);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void aggregate(MethodResult& r) {
  r.n_repeats = r.picp_raw.size();
  r.picp_mean = mean_of(r.picp_raw);
  r.picp_std = sample_std(r.picp_raw);
  r.length_mean = mean_of(r.length_raw);
  r.length_std = sample_std(r.length_raw);
}

std::vector<MethodResult> run_experiment(const ExperimentConfig& config) {
  const ExperimentData data(config);
  const auto methods = resolved_methods(config);
  const std::size_t cells = config.alphas.size() * methods.size();

  std::vector<RepeatOutcome> outcomes(config.n_repeats);
  parallel_for(config.n_repeats, config.jobs, [&](std::size_t r) {
    const RepeatData split = data.repeat(r);
    std::vector<double> ys;
    for (const auto& s : split.test) ys.push_back(s.y);
    RepeatOutcome& o = outcomes[r];
    for (double alpha : config.alphas) {
      for (const auto& m : methods) {
        const auto model = fit_method(m, split.train, split.cal, alpha, method_seed(config, r));
        std::vector<Interval> intervals;
        intervals.reserve(split.test.size());
        for (const auto& s : split.test) intervals.push_back(method_predict(model, s));
        const auto len = normalized_length_detail(intervals, ys);
        o.picp.push_back(picp(intervals, ys));
        o.length.push_back(len.percent);
        o.excluded.push_back(len.excluded);
      }
    }
  });

  std::vector<MethodResult> results;
  results.reserve(cells);
  std::size_t cell = 0;
  for (double alpha : config.alphas) {
    for (const auto& m : methods) {
      MethodResult res;
      res.dataset = config.dataset_name;
      res.method = std::string(to_string(m.kind));
      res.alpha = alpha;
      for (const auto& o : outcomes) {
        res.picp_raw.push_back(o.picp[cell]);
        res.length_raw.push_back(o.length[cell]);
        res.excluded += o.excluded[cell];
      }
      aggregate(res);
      results.push_back(std::move(res));
      ++cell;
    }
  }
  return results;
}

}  // namespace cpul::eval
