#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "robscatter/core.hpp"
#include "robscatter/rng.hpp"

namespace robscatter {

struct FastMcdConfig {
  std::optional<Index> h;  // defaults to floor((n + p + 1) / 2)
  int n_starts = 500;
  int n_keep = 10;
  int screen_steps = 2;
  std::uint64_t seed = 0;
  // Split the rows into groups of at most 300 for screening when n exceeds this.
  std::optional<Index> partition_threshold;
  int max_steps = 200;
};

// Random elemental start: p + 1 distinct rows, extended one uniformly drawn
// row at a time while their covariance is singular, followed by the h rows
// closest to the elemental mean and covariance.
// Throws DegenerateData when every row lies on one hyperplane.
HSubset initial_subset(const DataMatrix& x, Index h, CounterRng& rng);

struct FastMcdTrace {
  // log|cov| after screening, one entry per random start.
  std::vector<double> screened_log_dets;
  // log|cov| of the kept candidates after full concentration.
  std::vector<double> refined_log_dets;
  int best_start = -1;
  HSubset best;
};

struct FastMcdFit {
  LocationScatter estimate;  // kind RawMCD
  FastMcdTrace trace;
};

FastMcdFit fast_mcd_fit(const DataMatrix& x, const FastMcdConfig& config = {});

LocationScatter fast_mcd(const DataMatrix& x, const FastMcdConfig& config = {});

// Raw estimate from an optimal h-subset: subset mean, c0-scaled covariance.
LocationScatter raw_estimate_from_subset(const HSubset& best, Index n, Index p);

}  // namespace robscatter
