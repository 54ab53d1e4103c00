#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace cpul::dispatch {

// Directed transmission line; flow is positive from `from` to `to`.
struct Line {
  std::size_t from = 0;
  std::size_t to = 0;
  double susceptance = 1.0;
};

// Nodal PTDF (lines x buses) of the DC power-flow model with a single slack
// bus: flows = ptdf * injections for any balanced injection vector. The slack
// column is identically zero. Throws cpul::Error on a disconnected network,
// a bad bus index or a non-positive susceptance.
Eigen::MatrixXd compute_ptdf(std::size_t n_bus, const std::vector<Line>& lines,
                             std::size_t slack_bus = 0);

bool is_connected(std::size_t n_bus, const std::vector<Line>& lines);

}  // namespace cpul::dispatch
