#pragma once

#include <functional>
#include <vector>

#include "robscatter/core.hpp"

namespace robscatter {

inline constexpr double kCutoffProbability = 0.975;

// chi2_{p, 0.975} quantile and its square root.
double squared_cutoff(Index p);
double distance_cutoff(Index p);

// Weight of an observation given its squared robust distance. Must be bounded
// and vanish for large distances to preserve the raw breakdown value.
using WeightFunction = std::function<double(double squared_distance, Index p)>;

// 1 if d2 <= chi2_{p, 0.975}, else 0.
double hard_rejection_weight(double squared_distance, Index p);

// d(x_i, center, scatter) for every row. Throws SingularMatrix for a singular
// (exact-fit) scatter.
Vector robust_distances(const DataMatrix& x, const LocationScatter& estimate);

// One-step reweighted estimate from a raw estimate:
//   center  = sum w_i x_i / sum w_i
//   scatter = c1 (1/n) sum w_i (x_i - center)(x_i - center)'
// with c1 = (n / sum w_i) * 0.975 / F_{chi2, p+2}(chi2_{p, 0.975}).
// Throws TooFewInliers when sum w_i <= p.
LocationScatter reweight(const DataMatrix& x, const LocationScatter& raw,
                         const WeightFunction& weight = hard_rejection_weight);

// r_ij = s_ij / sqrt(s_ii s_jj).
Matrix robust_correlation(const Matrix& scatter);

struct OutlierReport {
  Vector md;  // classical Mahalanobis distances, NaN when Cov(X) is singular
  Vector rd;  // distances from the supplied estimate
  std::vector<int> weight;
  std::vector<bool> flagged;
  double cutoff = 0.0;  // sqrt(chi2_{p, 0.975})
  EstimatorKind kind = EstimatorKind::Classical;
  Index h = 0;
  double alpha = 1.0;

  Index flagged_count() const;
};

// Flags follow the squared distances: weight = 1 iff rd^2 <= chi2_{p,0.975},
// flagged iff weight = 0.
OutlierReport outlier_report(const DataMatrix& x, const LocationScatter& estimate);

struct DdPlotData {
  Vector md;
  Vector rd;
  double cutoff = 0.0;
};

// Classical versus robust distances. Throws SingularMatrix when Cov(X) is singular.
DdPlotData dd_plot_data(const DataMatrix& x, const LocationScatter& estimate);

}  // namespace robscatter
