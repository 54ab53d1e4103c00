#include "cpul/dispatch/case_io.hpp"

#include <fstream>
#include <sstream>

#include "cpul/error.hpp"
#include "json.hpp"

namespace cpul::dispatch {
namespace {

using nlohmann::json;

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Eigen::VectorXd r = m.row(i).transpose();
    rows.push_back(vec_json(r));
  }
  return rows;
}

Eigen::VectorXd json_vec(const json& j, std::size_t expected, const char* name) {
  const auto v = j.at(name).get<std::vector<double>>();
  if (v.size() != expected) throw Error(std::string("case field '") + name + "' has wrong length");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd json_mat(const json& j, std::size_t rows, std::size_t cols, const char* name) {
  const auto v = j.at(name).get<std::vector<std::vector<double>>>();
  if (v.size() != rows) throw Error(std::string("case field '") + name + "' has wrong row count");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (v[i].size() != cols) throw Error(std::string("case field '") + name + "' has ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[i][k];
    }
  }
  return m;
}

}  // namespace

std::string case_to_json(const GridCase& g) {
  json j;
  j["n_bus"] = g.n_bus;
  j["n_gen"] = g.n_gen;
  j["n_load"] = g.n_load;
  j["n_line"] = g.n_line;
  j["c"] = vec_json(g.c);
  j["p_min"] = vec_json(g.p_min);
  j["p_max"] = vec_json(g.p_max);
  j["f_min"] = vec_json(g.f_min);
  j["f_max"] = vec_json(g.f_max);
  j["ptdf"] = mat_json(g.ptdf);
  j["a_gen"] = mat_json(g.a_gen);
  j["a_load"] = mat_json(g.a_load);
  j["big_m"] = g.big_m;
  j["d0"] = vec_json(g.d0);
  json lines = json::array();
  for (const auto& l : g.lines) lines.push_back({{"from", l.from}, {"to", l.to}, {"susceptance", l.susceptance}});
  j["lines"] = lines;
  j["slack_bus"] = g.slack_bus;
  return j.dump(2) + "\n";
}

GridCase case_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("case file is not valid JSON: ") + e.what());
  }
  try {
    GridCase g;
    g.n_bus = j.at("n_bus").get<std::size_t>();
    g.n_gen = j.at("n_gen").get<std::size_t>();
    g.n_load = j.at("n_load").get<std::size_t>();
    g.n_line = j.at("n_line").get<std::size_t>();
    g.c = json_vec(j, g.n_gen, "c");
    g.p_min = json_vec(j, g.n_gen, "p_min");
    g.p_max = json_vec(j, g.n_gen, "p_max");
    g.f_min = json_vec(j, g.n_line, "f_min");
    g.f_max = json_vec(j, g.n_line, "f_max");
    g.ptdf = json_mat(j, g.n_line, g.n_bus, "ptdf");
    g.a_gen = json_mat(j, g.n_bus, g.n_gen, "a_gen");
    g.a_load = json_mat(j, g.n_bus, g.n_load, "a_load");
    g.big_m = j.at("big_m").get<double>();
    g.d0 = json_vec(j, g.n_load, "d0");
    for (const auto& l : j.at("lines")) {
      g.lines.push_back({l.at("from").get<std::size_t>(), l.at("to").get<std::size_t>(),
                         l.at("susceptance").get<double>()});
    }
    g.slack_bus = j.at("slack_bus").get<std::size_t>();
    validate_case(g);
    return g;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed case file: ") + e.what());
  }
}

void save_case(const GridCase& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << case_to_json(grid);
  if (!out) throw Error("write failed for '" + path + "'");
}

GridCase load_case(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read case file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return case_from_json(buf.str());
}

}  // namespace cpul::dispatch
