#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpul/dispatch/ptdf.hpp"

namespace cpul::dispatch {

enum class Topology { ring, star, random_tree_plus_chords };

std::string_view to_string(Topology topology);
// Accepts "ring", "star", "random-tree-plus-chords". Throws cpul::UsageError.
Topology parse_topology(std::string_view name);

// Economic-dispatch instance template. Units: MW for power, currency/MW for
// costs and the thermal-violation penalty big_m.
struct GridCase {
  std::size_t n_bus = 0;
  std::size_t n_gen = 0;
  std::size_t n_load = 0;
  std::size_t n_line = 0;
  Eigen::VectorXd c;       // n_gen
  Eigen::VectorXd p_min;   // n_gen
  Eigen::VectorXd p_max;   // n_gen
  Eigen::VectorXd f_min;   // n_line
  Eigen::VectorXd f_max;   // n_line
  Eigen::MatrixXd ptdf;    // n_line x n_bus
  Eigen::MatrixXd a_gen;   // n_bus x n_gen, one 1 per column
  Eigen::MatrixXd a_load;  // n_bus x n_load, one 1 per column
  double big_m = 0.0;
  Eigen::VectorXd d0;      // n_load

  // Network description the PTDF was built from.
  std::vector<Line> lines;
  std::size_t slack_bus = 0;

  // PTDF restricted to generator / load buses (n_line x n_gen, n_line x n_load).
  Eigen::MatrixXd ptdf_gen() const { return ptdf * a_gen; }
  Eigen::MatrixXd ptdf_load() const { return ptdf * a_load; }
};

// Throws cpul::Error describing the first violated structural invariant.
void validate_case(const GridCase& grid);

struct CaseSpec {
  std::size_t n_bus = 6;
  Topology topology = Topology::ring;
  std::uint64_t seed = 1;
  std::optional<std::size_t> n_gen;   // default: max(2, n_bus / 2), capped at n_bus
  std::optional<std::size_t> n_load;  // default: one load per bus
  // Line limits are scaled so roughly this fraction of load draws (global
  // factor in [0.6, 1], local factors in [0.85, 1.15]) end up congested.
  double congestion_target = 0.2;
  double capacity_margin = 1.5;  // total p_max / total d0, must be >= 1.2
};

// Deterministic synthetic case. Throws cpul::Error on degenerate specs
// ("need >= 2 buses", no generators, no loads).
GridCase build_case(const CaseSpec& spec);

}  // namespace cpul::dispatch
