#include "cpul/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpul/error.hpp"

namespace cpul {
namespace {

constexpr double kRankSnap = 1e-9;

double snapped(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= kRankSnap * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

std::size_t ceil_rank(double x) {
  const double c = std::ceil(snapped(x));
  return c <= 0.0 ? 0 : static_cast<std::size_t>(c);
}

std::size_t floor_rank(double x) {
  const double f = std::floor(snapped(x));
  return f <= 0.0 ? 0 : static_cast<std::size_t>(f);
}

double order_statistic(std::span<const double> values, std::size_t k) {
  if (values.empty()) throw Error("empty sample");
  if (k < 1 || k > values.size()) throw Error("order statistic rank out of range");
  std::vector<double> copy(values.begin(), values.end());
  auto nth = copy.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(copy.begin(), nth, copy.end());
  return *nth;
}

double empirical_quantile(std::span<const double> values, double beta) {
  if (values.empty()) throw Error("empty sample");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("quantile level must lie in [0, 1]");
  const std::size_t n = values.size();
  const std::size_t k = std::clamp<std::size_t>(ceil_rank(beta * static_cast<double>(n)), 1, n);
  return order_statistic(values, k);
}

}  // namespace cpul
