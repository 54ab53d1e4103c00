#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpul/dispatch/economic_dispatch.hpp"
#include "cpul/dispatch/grid_case.hpp"
#include "cpul/interval.hpp"
#include "cpul/methods.hpp"

namespace cpul::eval {

// Samples generated on the fly from a grid case. Proxies are refit on each
// repeat's training split.
struct GeneratorSource {
  dispatch::GridCase grid;
  dispatch::FactorRange global = dispatch::kDefaultGlobalRange;
  dispatch::FactorRange local = dispatch::kDefaultLocalRange;
  double primal_regularization = 100.0;
  double dual_regularization = 100.0;
  std::uint64_t data_seed = 0;
};

struct ExperimentConfig {
  std::string dataset_name = "synthetic";
  std::optional<GeneratorSource> generator;  // when unset, `dataset` is used
  std::vector<BoundedSample> dataset;
  std::size_t n_train = 2000;
  std::size_t n_cal = 1000;
  std::size_t n_test = 1000;
  std::size_t n_repeats = 10;
  std::vector<double> alphas{0.1};
  std::vector<MethodConfig> methods;  // empty = every method
  std::uint64_t base_seed = 0;
  unsigned jobs = 1;
};

// Throws cpul::Error (before any work) on invalid settings or too few samples.
void validate_config(const ExperimentConfig& config);

// Methods actually run: config.methods, or all seven when empty.
std::vector<MethodConfig> resolved_methods(const ExperimentConfig& config);

// Solved load pool: loads and their LP solutions.
struct LoadPool {
  std::vector<Eigen::VectorXd> loads;
  std::vector<dispatch::DispatchSolution> labels;
};

// Sample i draws from its own stream (data_seed, i); demand outside the
// aggregate generator limits is redrawn up to 100 times, then an error.
Eigen::VectorXd draw_load(const GeneratorSource& source, std::size_t index);
LoadPool build_pool(const GeneratorSource& source, std::size_t n, unsigned jobs = 1);

struct RepeatData {
  std::vector<BoundedSample> train;
  std::vector<BoundedSample> cal;
  std::vector<BoundedSample> test;
};

// Shared sample source for all repeats of one experiment.
class ExperimentData {
 public:
  explicit ExperimentData(const ExperimentConfig& config);

  // Repeat r: shuffle with seed base_seed + r, split train / cal / test.
  RepeatData repeat(std::size_t r) const;
  std::size_t size() const;

 private:
  ExperimentConfig config_;
  LoadPool pool_;
};

// Seed handed to fit_method on repeat r.
std::uint64_t method_seed(const ExperimentConfig& config, std::size_t r);

struct MethodResult {
  std::string dataset;
  std::string method;
  double alpha = 0.0;
  double picp_mean = 0.0;
  double picp_std = 0.0;
  double length_mean = 0.0;
  double length_std = 0.0;
  std::size_t n_repeats = 0;
  std::vector<double> picp_raw;
  std::vector<double> length_raw;
  std::size_t excluded = 0;  // near-zero labels skipped by the length metric
};

double mean_of(const std::vector<double>& v);
// Sample (n - 1) standard deviation; 0 for a single value.
double sample_std(const std::vector<double>& v);

// Fills means and standard deviations from the raw per-repeat values.
void aggregate(MethodResult& result);

// One result per (alpha, method), alphas outer, in configuration order.
std::vector<MethodResult> run_experiment(const ExperimentConfig& config);

}  // namespace cpul::eval
