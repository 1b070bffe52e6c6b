#pragma once

#include <vector>

#include "robscatter/core.hpp"

namespace robscatter {

// Ordering used at the h-th smallest distance.
enum class TieBreak {
  Index,  // smaller row index first
  Value,  // lexicographic row values, then row index (permutation invariant)
};

// Sorted indices of the h rows with smallest squared distance.
std::vector<Index> select_smallest(const Vector& squared_distances, Index h,
                                   const DataMatrix& x, TieBreak tie = TieBreak::Index);

// One concentration step: the h rows closest to (current.mean, current.cov).
// Throws SingularSubset if the current covariance is singular.
HSubset c_step(const DataMatrix& x, const HSubset& current, TieBreak tie = TieBreak::Index);

struct ConcentrationResult {
  HSubset subset;
  int n_steps = 0;
  bool converged = false;
  // log|cov| of the start followed by the result of every step.
  std::vector<double> log_det_trace;
};

inline constexpr int kDefaultMaxSteps = 200;

// Iterates c_step until the index set repeats, the subset becomes singular
// (exact fit, reported as converged) or max_steps steps were taken.
ConcentrationResult concentrate(const DataMatrix& x, HSubset start,
                                int max_steps = kDefaultMaxSteps,
                                TieBreak tie = TieBreak::Index);

}  // namespace robscatter
