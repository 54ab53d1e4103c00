#pragma once

#include <cstddef>
#include <span>

namespace cpul {

// ceil(x) / floor(x) for rank arithmetic. Products such as (1 - alpha)(n + 1)
// are snapped to the nearest integer when within 1e-9 relative of it, so
// that e.g. 0.9 * 10 always gives rank 9 regardless of representation error.
std::size_t ceil_rank(double x);
std::size_t floor_rank(double x);

// Order statistic v_(k) of the ascending-sorted values, k = max(1, ceil(beta n)).
// No interpolation. Throws cpul::Error("empty sample") on empty input.
double empirical_quantile(std::span<const double> values, double beta);

// k-th smallest (1-based) of `values`; k must be in [1, n].
double order_statistic(std::span<const double> values, std::size_t k);

}  // namespace cpul
