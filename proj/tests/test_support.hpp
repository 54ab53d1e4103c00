#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cpul/interval.hpp"
#include "cpul/random.hpp"

namespace cpul::testing {

// Brute-force calibration oracle: scan the sorted candidate thresholds and
// return the first one whose coverage count reaches (1 - alpha)(n + 1).
inline double enumerate_threshold(std::vector<double> scores, double alpha, double sup) {
  std::sort(scores.begin(), scores.end());
  const double need = (1.0 - alpha) * static_cast<double>(scores.size() + 1);
  for (double t : scores) {
    std::size_t covered = 0;
    for (double s : scores) covered += s <= t ? 1 : 0;
    // Same 1e-9 snapping as the rank rule; exact in all tested cases.
    if (static_cast<double>(covered) >= need - 1e-9 * need) return t;
  }
  return sup;
}

// A random valid sample: b_lo <= y <= b_hi, gap in [0, 2*spread].
inline BoundedSample random_sample(Rng& rng, double spread = 1.0) {
  BoundedSample s;
  const double center = rng.uniform(-50.0, 50.0);
  s.b_lo = center - rng.uniform(0.0, spread);
  s.b_hi = center + rng.uniform(0.0, spread);
  s.y = rng.uniform(s.b_lo, s.b_hi);
  s.features = {center};
  return s;
}

// Heteroskedastic synthetic bounds: tight lower bound, loose upper bound with
// input-dependent slack.
inline std::vector<BoundedSample> heteroskedastic_set(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BoundedSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    BoundedSample s;
    const double x = rng.uniform(0.0, 1.0);
    s.features = {x};
    s.y = 100.0 + 20.0 * x;
    s.b_lo = s.y - rng.uniform(0.0, 0.3);
    s.b_hi = s.y + rng.uniform(0.0, 1.0 + 4.0 * x);
    out.push_back(s);
  }
  return out;
}

}  // namespace cpul::testing
