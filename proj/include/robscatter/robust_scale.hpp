#pragma once

#include <span>

namespace robscatter {

inline constexpr double kQnConsistency = 2.2219;

// Even n: midpoint of the two central order statistics.
double median(std::span<const double> x);

// Qn scale: 2.2219 times the k-th smallest |x_i - x_j|, i < j, with
// k = C(floor(n/2) + 1, 2). Exact, O(n log n). Throws ZeroScale when that
// order statistic is 0 and DomainError for n < 2.
double qn_scale(std::span<const double> x);

}  // namespace robscatter
