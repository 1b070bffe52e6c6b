#pragma once

#include <span>

#include "robscatter/core.hpp"

namespace robscatter {

struct UniMcdResult {
  double location = 0.0;
  double scale = 0.0;          // sqrt(raw_variance * c0)
  double raw_variance = 0.0;   // divisor h - 1
  Index subset_start = 0;      // window start in sorted order
  Index h = 0;
  double c0 = 1.0;
  bool exact_fit = false;      // best window has zero variance
};

// Exact univariate MCD: the contiguous window of h sorted values with the
// smallest variance. Ties between windows go to the smallest start.
UniMcdResult uni_mcd(std::span<const double> x, Index h);

// Exhaustive search over all C(n, h) subsets; n <= 20, otherwise InstanceTooLarge.
UniMcdResult uni_mcd_bruteforce(std::span<const double> x, Index h);

// argmin over mu of the sum of the h smallest squared residuals x_i - mu.
double lts_location(std::span<const double> x, Index h);

// Univariate MCD packaged as a 1x1 raw location/scatter estimate.
LocationScatter uni_mcd_estimate(const DataMatrix& x, Index h);

}  // namespace robscatter
