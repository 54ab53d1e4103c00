#include "cpul/dispatch/ptdf.hpp"

#include <numeric>

#include "cpul/error.hpp"

namespace cpul::dispatch {

bool is_connected(std::size_t n_bus, const std::vector<Line>& lines) {
  std::vector<std::size_t> parent(n_bus);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = n_bus;
  for (const auto& l : lines) {
    const auto a = find(l.from);
    const auto b = find(l.to);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components <= 1;
}

Eigen::MatrixXd compute_ptdf(std::size_t n_bus, const std::vector<Line>& lines,
                             std::size_t slack_bus) {
  if (n_bus < 2) throw Error("need >= 2 buses");
  if (slack_bus >= n_bus) throw Error("slack bus out of range");
  for (const auto& l : lines) {
    if (l.from >= n_bus || l.to >= n_bus || l.from == l.to) throw Error("invalid line endpoints");
    if (!(l.susceptance > 0.0)) throw Error("line susceptance must be positive");
  }
  if (!is_connected(n_bus, lines)) throw Error("disconnected network");

  const auto n = static_cast<Eigen::Index>(n_bus);
  const auto e = static_cast<Eigen::Index>(lines.size());
  // Branch-bus susceptance matrix B_f = diag(b) * incidence.
  Eigen::MatrixXd b_f = Eigen::MatrixXd::Zero(e, n);
  for (Eigen::Index k = 0; k < e; ++k) {
    const auto& l = lines[static_cast<std::size_t>(k)];
    b_f(k, static_cast<Eigen::Index>(l.from)) = l.susceptance;
    b_f(k, static_cast<Eigen::Index>(l.to)) = -l.susceptance;
  }
  Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(e, n);
  for (Eigen::Index k = 0; k < e; ++k) {
    const auto& l = lines[static_cast<std::size_t>(k)];
    incidence(k, static_cast<Eigen::Index>(l.from)) = 1.0;
    incidence(k, static_cast<Eigen::Index>(l.to)) = -1.0;
  }
  const Eigen::MatrixXd b_bus = incidence.transpose() * b_f;

  // Drop the slack row/column and solve the reduced system.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != static_cast<Eigen::Index>(slack_bus)) keep.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd b_red(r, r);
  Eigen::MatrixXd b_f_red(e, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    b_f_red.col(a) = b_f.col(keep[a]);
    for (Eigen::Index b = 0; b < r; ++b) b_red(a, b) = b_bus(keep[a], keep[b]);
  }
  // ptdf_red = B_f,red * B_red^-1, via the symmetric solve B_red X' = B_f,red'.
  const Eigen::MatrixXd reduced = b_red.ldlt().solve(b_f_red.transpose()).transpose();

  Eigen::MatrixXd ptdf = Eigen::MatrixXd::Zero(e, n);
  for (Eigen::Index a = 0; a < r; ++a) ptdf.col(keep[a]) = reduced.col(a);
  return ptdf;
}

}  // namespace cpul::dispatch
