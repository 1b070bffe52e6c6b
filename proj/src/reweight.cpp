#include "robscatter/reweight.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "robscatter/chi_square.hpp"
#include "robscatter/errors.hpp"

namespace robscatter {
namespace {

Vector squared_robust_distances(const DataMatrix& x, const LocationScatter& est) {
  if (est.center.size() != x.p() || est.scatter.rows() != x.p()) {
    throw DomainError("estimate dimension does not match the data");
  }
  auto f = SpdFactor::factor(est.scatter);
  if (!f) {
    throw SingularMatrix("scatter estimate is singular (exact fit); distances are undefined");
  }
  return f->squared_distances(x.values(), est.center);
}

}  // namespace

double squared_cutoff(Index p) {
  return chi2_quantile(kCutoffProbability, static_cast<int>(p));
}

double distance_cutoff(Index p) { return std::sqrt(squared_cutoff(p)); }

double hard_rejection_weight(double squared_distance, Index p) {
  return squared_distance <= squared_cutoff(p) ? 1.0 : 0.0;
}

Vector robust_distances(const DataMatrix& x, const LocationScatter& estimate) {
  return squared_robust_distances(x, estimate).cwiseSqrt();
}

LocationScatter reweight(const DataMatrix& x, const LocationScatter& raw,
                         const WeightFunction& weight) {
  const Index n = x.n();
  const Index p = x.p();
  const Vector d2 = squared_robust_distances(x, raw);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w(i) = weight(d2(i), p);
  const double total = w.sum();
  if (!(total > static_cast<double>(p))) {
    throw TooFewInliers("reweight: " + std::to_string(total) +
                        " total weight, need more than p = " + std::to_string(p));
  }

  LocationScatter est;
  est.kind = EstimatorKind::WeightedMCD;
  est.h = raw.h;
  est.alpha = raw.alpha;
  est.c0 = raw.c0;
  est.consistency_applied = true;
  est.center = (x.values().transpose() * w) / total;
  const Matrix centered = x.values().rowwise() - est.center.transpose();
  Matrix s = centered.transpose() * w.asDiagonal() * centered / static_cast<double>(n);
  const double q = squared_cutoff(p);
  est.c1 = (static_cast<double>(n) / total) *
           (kCutoffProbability / chi2_cdf(q, static_cast<int>(p) + 2));
  s *= est.c1;
  est.scatter = 0.5 * (s + s.transpose());
  est.log_det = log_det_spd(est.scatter);
  est.exact_fit = est.log_det == kNegInf;
  for (Index i = 0; i < n; ++i) {
    if (w(i) > 0.0) est.subset.push_back(i);
  }
  est.warnings = raw.warnings;
  return est;
}

Matrix robust_correlation(const Matrix& scatter) {
  const Vector d = scatter.diagonal();
  if ((d.array() <= 0.0).any()) throw DomainError("robust_correlation: nonpositive diagonal");
  const Vector inv = d.cwiseSqrt().cwiseInverse();
  Matrix r = inv.asDiagonal() * scatter * inv.asDiagonal();
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  return r;
}

Index OutlierReport::flagged_count() const {
  Index c = 0;
  for (const bool f : flagged) c += f ? 1 : 0;
  return c;
}

OutlierReport outlier_report(const DataMatrix& x, const LocationScatter& estimate) {
  const Index n = x.n();
  OutlierReport r;
  const Vector d2 = squared_robust_distances(x, estimate);
  const double q = squared_cutoff(x.p());
  r.rd = d2.cwiseSqrt();
  r.cutoff = std::sqrt(q);
  try {
    r.md = mahalanobis_all(x);
  } catch (const SingularMatrix&) {
    r.md = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  }
  r.weight.resize(static_cast<std::size_t>(n));
  r.flagged.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const bool inlier = d2(i) <= q;
    r.weight[static_cast<std::size_t>(i)] = inlier ? 1 : 0;
    r.flagged[static_cast<std::size_t>(i)] = !inlier;
  }
  r.kind = estimate.kind;
  r.h = estimate.h;
  r.alpha = estimate.alpha;
  return r;
}

DdPlotData dd_plot_data(const DataMatrix& x, const LocationScatter& estimate) {
  DdPlotData d;
  d.md = mahalanobis_all(x);
  d.rd = robust_distances(x, estimate);
  d.cutoff = distance_cutoff(x.p());
  return d;
}

}  // namespace robscatter
