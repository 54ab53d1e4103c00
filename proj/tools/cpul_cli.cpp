// cpul: case generation, dataset generation and conformal evaluation.

#include <Eigen/Dense>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpul/dispatch/case_io.hpp"
#include "cpul/dispatch/economic_dispatch.hpp"
#include "cpul/dispatch/grid_case.hpp"
#include "cpul/error.hpp"
#include "cpul/eval/config_io.hpp"
#include "cpul/eval/dataset_io.hpp"
#include "cpul/eval/experiment.hpp"
#include "cpul/eval/parallel.hpp"
#include "cpul/eval/report.hpp"
#include "cpul/methods.hpp"
#include "cpul/proxies/proxies.hpp"
#include "cpul/random.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cpul;

namespace {

constexpr const char* kVersion = "cpul 1.0.0";
constexpr const char* kSeedEnv = "CPUL_SEED";
constexpr std::size_t kChunk = 512;

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (!env || !*env) return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw UsageError(std::string(kSeedEnv) + " must be a non-negative integer");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_output(const std::string& path, bool force) {
  if (fs::exists(path) && !force) {
    throw UsageError("'" + path + "' already exists (use --force to overwrite)");
  }
}

dispatch::FactorRange parse_range(const std::string& text, const char* flag) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("no comma");
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, comma);
    const std::string hi_text = text.substr(comma + 1);
    const double lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw std::invalid_argument("lo");
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument("hi");
    if (!(lo > 0.0 && lo <= hi)) throw std::invalid_argument("order");
    return {lo, hi};
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + " expects LO,HI with 0 < LO <= HI");
  }
}

// Manifest: the hash covers everything that determines output bytes; paths
// are recorded but not hashed.
struct Manifest {
  nlohmann::ordered_json hashed;
  nlohmann::ordered_json paths;

  std::string hash() const { return eval::hex64(eval::fnv1a64(hashed.dump())); }

  void write(const std::string& path) const {
    nlohmann::ordered_json doc;
    doc["tool_version"] = kVersion;
    doc["hash"] = hash();
    doc["inputs"] = hashed;
    doc["artifacts"] = paths;
    eval::write_text_file(path, doc.dump(2) + "\n");
  }
};

Manifest start_manifest(const std::string& command) {
  Manifest m;
  m.hashed["tool_version"] = kVersion;
  m.hashed["command"] = command;
  return m;
}

// ---- gen-case ----

struct GenCaseOptions {
  std::string topology = "ring";
  std::size_t buses = 6;
  std::optional<std::uint64_t> seed;
  double congestion_target = 0.2;
  std::string out;
  bool force = false;
};

int run_gen_case(const GenCaseOptions& o) {
  if (o.buses < 2) throw UsageError("need >= 2 buses");
  dispatch::CaseSpec spec;
  spec.topology = dispatch::parse_topology(o.topology);
  spec.n_bus = o.buses;
  spec.seed = o.seed.value_or(default_seed());
  spec.congestion_target = o.congestion_target;
  check_output(o.out, o.force);
  const auto grid = dispatch::build_case(spec);
  const auto text = dispatch::case_to_json(grid);
  eval::write_text_file(o.out, text);

  auto m = start_manifest("gen-case");
  m.hashed["topology"] = o.topology;
  m.hashed["buses"] = o.buses;
  m.hashed["seed"] = spec.seed;
  m.hashed["congestion_target"] = o.congestion_target;
  m.paths["case"] = o.out;
  m.write(o.out + ".manifest.json");
  std::cout << "wrote " << o.out << " (" << grid.n_bus << " buses, " << grid.n_gen
            << " generators, " << grid.n_line << " lines)\n";
  return 0;
}

// ---- gen-data ----

struct GenDataOptions {
  std::string case_path;
  std::size_t n = 0;
  std::string global_range = "0.6,1.0";
  std::string local_range = "0.85,1.15";
  std::optional<std::uint64_t> seed;
  std::size_t proxy_train = 1000;
  double primal_reg = 100.0;
  double dual_reg = 100.0;
  unsigned jobs = 1;
  std::string out;
  bool force = false;
};

int run_gen_data(const GenDataOptions& o) {
  if (o.n == 0) throw UsageError("--n must be positive");
  if (o.proxy_train < 2) throw UsageError("--proxy-train must be at least 2");
  check_output(o.out, o.force);
  const std::string case_text = read_file(o.case_path);
  const auto grid = dispatch::case_from_json(case_text);
  const std::uint64_t seed = o.seed.value_or(default_seed());

  eval::GeneratorSource src;
  src.grid = grid;
  src.global = parse_range(o.global_range, "--global-range");
  src.local = parse_range(o.local_range, "--local-range");
  src.primal_regularization = o.primal_reg;
  src.dual_regularization = o.dual_reg;

  // Proxies are trained on a separate stream of samples that are not emitted.
  auto train_src = src;
  train_src.data_seed = derive_seed(seed, 0x7072);
  const auto train = eval::build_pool(train_src, o.proxy_train, o.jobs);
  const auto primal = proxies::fit_primal_proxy(grid, train.loads, train.labels, o.primal_reg);
  const auto dual = proxies::fit_dual_proxy(grid, train.loads, train.labels, o.dual_reg);

  src.data_seed = seed;
  eval::DatasetWriter writer(o.out, grid.n_load);
  for (std::size_t start = 0; start < o.n; start += kChunk) {
    const std::size_t count = std::min(kChunk, o.n - start);
    std::vector<Eigen::VectorXd> loads(count);
    std::vector<double> objectives(count);
    eval::parallel_for(count, o.jobs, [&](std::size_t k) {
      loads[k] = eval::draw_load(src, start + k);
      objectives[k] = dispatch::solve_dispatch(grid, loads[k]).primal.objective;
    });
    const auto samples = proxies::make_bounded_samples(grid, loads, objectives, primal, dual);
    for (std::size_t k = 0; k < count; ++k) {
      const std::vector<double> d(loads[k].data(), loads[k].data() + loads[k].size());
      writer.write(start + k, d, samples[k].y, samples[k].b_lo, samples[k].b_hi);
    }
  }
  writer.close();

  auto m = start_manifest("gen-data");
  m.hashed["case_hash"] = eval::hex64(eval::fnv1a64(case_text));
  m.hashed["n"] = o.n;
  m.hashed["global_range"] = {src.global.lo, src.global.hi};
  m.hashed["local_range"] = {src.local.lo, src.local.hi};
  m.hashed["seed"] = seed;
  m.hashed["proxy_train"] = o.proxy_train;
  m.hashed["primal_regularization"] = o.primal_reg;
  m.hashed["dual_regularization"] = o.dual_reg;
  m.paths["case"] = o.case_path;
  m.paths["dataset"] = o.out;
  m.write(o.out + ".manifest.json");
  std::cout << "wrote " << o.n << " samples to " << o.out << "\n";
  return 0;
}

// ---- evaluate ----

struct EvaluateOptions {
  std::string config;
  std::string out_dir;
  std::string methods;
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> seed;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_evaluate(const EvaluateOptions& o) {
  if (!fs::exists(o.config)) throw UsageError("config file '" + o.config + "' not found");
  auto config = eval::load_config(o.config);
  if (!o.methods.empty()) {
    const double reserved = config.methods.empty() ? 0.2 : config.methods.front().reserved_fraction;
    const auto grid = config.methods.empty() ? std::vector<double>{} : config.methods.front().ell_grid;
    config.methods.clear();
    for (const auto& name : split_list(o.methods)) {
      config.methods.push_back({parse_method(name), reserved, grid});
    }
    if (config.methods.empty()) throw UsageError("--methods is empty");
  }
  if (o.jobs) config.jobs = *o.jobs;
  if (o.seed) config.base_seed = *o.seed;
  eval::validate_config(config);

  fs::create_directories(o.out_dir);
  const auto results = eval::run_experiment(config);

  auto m = start_manifest("evaluate");
  const std::string config_text = read_file(o.config);
  m.hashed["config_hash"] = eval::hex64(eval::fnv1a64(config_text));
  const auto doc = nlohmann::json::parse(config_text);
  for (const char* key : {"dataset", "case"}) {
    if (!doc.contains(key)) continue;
    fs::path input(doc.at(key).get<std::string>());
    if (input.is_relative()) input = fs::path(o.config).parent_path() / input;
    m.hashed[std::string(key) + "_hash"] = eval::hex64(eval::fnv1a64(read_file(input.string())));
    m.paths[key] = input.string();
  }
  m.hashed["base_seed"] = config.base_seed;
  std::vector<std::string> names;
  for (const auto& mc : config.methods) names.emplace_back(to_string(mc.kind));
  m.hashed["methods"] = names;
  const auto dir = fs::path(o.out_dir);
  const auto csv = (dir / "results.csv").string();
  const auto json = (dir / "results.json").string();
  const auto report = (dir / "report.txt").string();
  const auto plot = (dir / "plot_data.csv").string();
  m.paths["config"] = o.config;
  m.paths["results_csv"] = csv;
  m.paths["results_json"] = json;
  m.paths["report"] = report;
  m.paths["plot_data"] = plot;
  const auto hash = m.hash();

  eval::emit_results(results, eval::ResultFormat::csv, csv, hash);
  eval::emit_results(results, eval::ResultFormat::json, json, hash);
  eval::write_text_file(report, eval::results_report(results, hash));
  eval::write_text_file(plot, eval::plot_data_csv(results, hash));
  m.write((dir / "manifest.json").string());
  std::cout << eval::results_report(results, hash);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal prediction from upper and lower bounds: data and evaluation pipeline"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GenCaseOptions gc;
  auto* gen_case = app.add_subcommand("gen-case", "Build a synthetic grid case file");
  gen_case->add_option("--topology", gc.topology, "ring | star | random-tree-plus-chords")
      ->capture_default_str();
  gen_case->add_option("--buses", gc.buses, "Number of buses")->capture_default_str();
  gen_case->add_option("--seed", gc.seed, std::string("Seed (default: $") + kSeedEnv + " or 1)");
  gen_case->add_option("--congestion-target", gc.congestion_target,
                       "Fraction of sampled loads meant to congest a line")
      ->capture_default_str();
  gen_case->add_option("--out", gc.out, "Output case file")->required();
  gen_case->add_flag("--force", gc.force, "Overwrite an existing output file");

  GenDataOptions gd;
  auto* gen_data = app.add_subcommand("gen-data", "Sample loads, solve, and emit bounded samples");
  gen_data->add_option("--case", gd.case_path, "Case file from gen-case")->required();
  gen_data->add_option("--n", gd.n, "Number of samples")->required();
  gen_data->add_option("--global-range", gd.global_range, "Global factor range LO,HI")
      ->capture_default_str();
  gen_data->add_option("--local-range", gd.local_range, "Per-load factor range LO,HI")
      ->capture_default_str();
  gen_data->add_option("--seed", gd.seed, std::string("Seed (default: $") + kSeedEnv + " or 1)");
  gen_data->add_option("--proxy-train", gd.proxy_train, "Extra samples used to fit the proxies")
      ->capture_default_str();
  gen_data->add_option("--primal-reg", gd.primal_reg, "Ridge penalty of the primal proxy")
      ->capture_default_str();
  gen_data->add_option("--dual-reg", gd.dual_reg, "Ridge penalty of the dual proxy")
      ->capture_default_str();
  gen_data->add_option("--jobs", gd.jobs, "Worker threads")->capture_default_str();
  gen_data->add_option("--out", gd.out, "Output dataset file")->required();
  gen_data->add_flag("--force", gd.force, "Overwrite an existing output file");

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Run the repeated-split experiment");
  evaluate->add_option("--config", ev.config, "Experiment config (JSON)")->required();
  evaluate->add_option("--out-dir", ev.out_dir, "Directory for results")->required();
  evaluate->add_option("--methods", ev.methods, "Comma-separated subset of methods");
  evaluate->add_option("--jobs", ev.jobs, "Worker threads (overrides config)");
  evaluate->add_option("--seed", ev.seed, "Base seed (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_case) return run_gen_case(gc);
    if (*gen_data) return run_gen_data(gd);
    if (*evaluate) return run_evaluate(ev);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
