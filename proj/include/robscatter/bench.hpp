#pragma once

#include <cstdint>
#include <optional>

#include "robscatter/core.hpp"
#include "robscatter/rng.hpp"

namespace robscatter {

// i.i.d. standard normal n x p matrix (Box-Muller on the counter generator).
Matrix standard_normal_matrix(Index n, Index p, CounterRng& rng);

enum class BenchEstimator { FastMcd, DetMcd };

struct EfficiencyConfig {
  Index p = 2;
  double alpha = 0.5;
  std::optional<Index> h;  // overrides alpha
  Index n = 1000;
  int reps = 500;
  std::uint64_t seed = 1;
  BenchEstimator estimator = BenchEstimator::FastMcd;
  int n_starts = 500;
};

struct EfficiencyResult {
  Index h = 0;
  int reps = 0;
  // Monte Carlo variance of the sample covariance diagonal over that of the
  // MCD diagonal, pooled over the p diagonal entries; jackknife standard errors.
  double raw = 0.0;
  double raw_se = 0.0;
  double weighted = 0.0;
  double weighted_se = 0.0;
};

// Throws ConfigError when n * reps exceeds 1e7.
EfficiencyResult bench_efficiency(const EfficiencyConfig& config);

struct BreakdownConfig {
  Index n = 40;
  Index p = 2;
  Index h = 21;
  int trials = 200;
  double distance = 1e6;
  double cluster_sd = 1e-2;
  std::uint64_t seed = 7;
  int n_starts = 500;
};

struct BreakdownResult {
  int trials = 0;
  Index scattered_count = 0;  // h - p rows, each at a random direction
  Index clustered_count = 0;  // n - h + 1 rows in one tight cluster
  int held = 0;    // scattered: raw center inside the 2x inflated hull of the clean rows
  int broken = 0;  // clustered: raw center farther than 1e3 from the clean centroid
  // Runs whose contaminated sample is singular under the library's pivot rule.
  // They count as neither held nor broken.
  int degenerate = 0;
};

// Planar breakdown stress test of the raw FastMCD center, with h - p
// replaced rows (scattered at the given distance) and with n - h + 1 replaced
// rows (clustered at the given distance).
BreakdownResult bench_breakdown(const BreakdownConfig& config);

struct EquivarianceConfig {
  Index n = 200;
  Index p = 4;
  int trials = 20;
  std::uint64_t seed = 11;
};

struct EquivarianceResult {
  int trials = 0;
  // Relative Frobenius deviations of det_mcd(X A' + 1 b') from the transformed
  // det_mcd(X), for random non-diagonal A.
  double mean_center_dev = 0.0;
  double max_center_dev = 0.0;
  double mean_scatter_dev = 0.0;
  double max_scatter_dev = 0.0;
};

EquivarianceResult bench_detmcd_equivariance(const EquivarianceConfig& config);

// True when point lies in the convex hull of the planar points scaled by
// factor about their centroid.
bool inside_inflated_hull(const Matrix& points, const Vector& point, double factor);

}  // namespace robscatter
