#include "cpul/eval/config_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cpul/dispatch/case_io.hpp"
#include "cpul/error.hpp"
#include "cpul/eval/dataset_io.hpp"
#include "json.hpp"

namespace cpul::eval {
namespace {

using nlohmann::json;

const std::set<std::string> kKeys{
    "dataset_name", "dataset",     "case",        "case_spec",       "global_range",
    "local_range",  "primal_regularization",      "dual_regularization", "data_seed",
    "n_train",      "n_cal",       "n_test",      "n_repeats",       "alphas",
    "methods",      "reserved_fraction",          "ell_grid",        "base_seed",
    "jobs"};

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config: bad value for '") + key + "'");
  }
}

dispatch::FactorRange range(const json& j, const char* key, dispatch::FactorRange fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = get<std::vector<double>>(j, key, {});
  if (v.size() != 2) throw UsageError(std::string("config: '") + key + "' needs [lo, hi]");
  return {v[0], v[1]};
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (std::filesystem::path(base_dir) / path).string();
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw UsageError("config: unknown key '" + key + "'");
  }
  const int sources = static_cast<int>(j.contains("dataset")) + static_cast<int>(j.contains("case")) +
                      static_cast<int>(j.contains("case_spec"));
  if (sources != 1) throw UsageError("config needs exactly one of 'dataset', 'case', 'case_spec'");

  ExperimentConfig c;
  c.dataset_name = get<std::string>(j, "dataset_name", c.dataset_name);
  c.n_train = get<std::size_t>(j, "n_train", c.n_train);
  c.n_cal = get<std::size_t>(j, "n_cal", c.n_cal);
  c.n_test = get<std::size_t>(j, "n_test", c.n_test);
  c.n_repeats = get<std::size_t>(j, "n_repeats", c.n_repeats);
  c.alphas = get<std::vector<double>>(j, "alphas", c.alphas);
  c.base_seed = get<std::uint64_t>(j, "base_seed", c.base_seed);
  c.jobs = get<unsigned>(j, "jobs", c.jobs);

  const double reserved = get<double>(j, "reserved_fraction", 0.2);
  const auto grid = get<std::vector<double>>(j, "ell_grid", {});
  std::vector<std::string> names;
  if (j.contains("methods")) {
    names = get<std::vector<std::string>>(j, "methods", {});
  } else {
    for (auto k : kAllMethods) names.emplace_back(to_string(k));
  }
  for (const auto& n : names) c.methods.push_back({parse_method(n), reserved, grid});

  if (j.contains("dataset")) {
    c.dataset = read_dataset(resolve(base_dir, get<std::string>(j, "dataset", "")));
    return c;
  }
  GeneratorSource src;
  if (j.contains("case")) {
    src.grid = dispatch::load_case(resolve(base_dir, get<std::string>(j, "case", "")));
  } else {
    const json& s = j.at("case_spec");
    if (!s.is_object()) throw UsageError("config: 'case_spec' must be an object");
    for (const auto& [key, _] : s.items()) {
      if (key != "topology" && key != "buses" && key != "seed" && key != "congestion_target") {
        throw UsageError("config: unknown case_spec key '" + key + "'");
      }
    }
    dispatch::CaseSpec spec;
    spec.topology = dispatch::parse_topology(get<std::string>(s, "topology", "ring"));
    spec.n_bus = get<std::size_t>(s, "buses", spec.n_bus);
    spec.seed = get<std::uint64_t>(s, "seed", spec.seed);
    spec.congestion_target = get<double>(s, "congestion_target", spec.congestion_target);
    src.grid = dispatch::build_case(spec);
  }
  src.global = range(j, "global_range", src.global);
  src.local = range(j, "local_range", src.local);
  src.primal_regularization = get<double>(j, "primal_regularization", src.primal_regularization);
  src.dual_regularization = get<double>(j, "dual_regularization", src.dual_regularization);
  src.data_seed = get<std::uint64_t>(j, "data_seed", src.data_seed);
  c.generator = std::move(src);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return config_from_json(buf.str(), dir.empty() ? "." : dir);
}

}  // namespace cpul::eval
