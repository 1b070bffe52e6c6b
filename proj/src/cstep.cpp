#include "robscatter/cstep.hpp"

#include <algorithm>
#include <numeric>

#include "robscatter/errors.hpp"

namespace robscatter {

std::vector<Index> select_smallest(const Vector& squared_distances, Index h,
                                   const DataMatrix& x, TieBreak tie) {
  const Index n = squared_distances.size();
  if (h < 1 || h > n) throw DomainError("select_smallest: h out of range");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  const Matrix& values = x.values();
  auto less = [&](Index a, Index b) {
    const double da = squared_distances(a);
    const double db = squared_distances(b);
    if (da != db) return da < db;
    if (tie == TieBreak::Value) {
      for (Index j = 0; j < values.cols(); ++j) {
        if (values(a, j) != values(b, j)) return values(a, j) < values(b, j);
      }
    }
    return a < b;
  };
  if (h < n) {
    std::nth_element(order.begin(), order.begin() + (h - 1), order.end(), less);
  }
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

HSubset c_step(const DataMatrix& x, const HSubset& current, TieBreak tie) {
  auto f = SpdFactor::factor(current.cov);
  if (current.singular() || !f) {
    throw SingularSubset("c_step: covariance of the current subset is singular");
  }
  const Vector d2 = f->squared_distances(x.values(), current.mean);
  return subset_stats(x, select_smallest(d2, current.h(), x, tie));
}

ConcentrationResult concentrate(const DataMatrix& x, HSubset start, int max_steps,
                                TieBreak tie) {
  if (max_steps < 1) throw DomainError("concentrate: max_steps must be at least 1");
  if (start.singular()) throw SingularSubset("concentrate: start subset is singular");
  ConcentrationResult result;
  result.log_det_trace.push_back(start.log_det);
  result.subset = std::move(start);
  while (result.n_steps < max_steps) {
    HSubset next = c_step(x, result.subset, tie);
    ++result.n_steps;
    result.log_det_trace.push_back(next.log_det);
    const bool same = next.indices == result.subset.indices;
    result.subset = std::move(next);
    if (same || result.subset.singular()) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace robscatter
