#include "robscatter/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robscatter/chi_square.hpp"
#include "robscatter/errors.hpp"

namespace robscatter {

DataMatrix::DataMatrix(Matrix values, std::vector<std::string> column_names)
    : values_(std::move(values)), column_names_(std::move(column_names)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw DegenerateData("data matrix needs at least one row and one column");
  }
  if (!column_names_.empty() && static_cast<Index>(column_names_.size()) != values_.cols()) {
    throw DataError("column name count does not match column count");
  }
  for (Index j = 0; j < values_.cols(); ++j) {
    for (Index i = 0; i < values_.rows(); ++i) {
      if (!std::isfinite(values_(i, j))) {
        throw DataError("non-finite value at row " + std::to_string(i) + ", column " +
                        std::to_string(j));
      }
    }
  }
}

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::RawMCD:
      return "raw_mcd";
    case EstimatorKind::WeightedMCD:
      return "weighted_mcd";
    case EstimatorKind::UniMCD:
      return "uni_mcd";
    case EstimatorKind::MRCD:
      return "mrcd";
    case EstimatorKind::Classical:
      return "classical";
  }
  return "unknown";
}

SpdFactor::SpdFactor(Eigen::LLT<Matrix> llt) : llt_(std::move(llt)) {
  const auto& l = llt_.matrixLLT();
  double sum = 0.0;
  for (Index j = 0; j < l.rows(); ++j) sum += std::log(l(j, j));
  log_det_ = 2.0 * sum;
}

std::optional<SpdFactor> SpdFactor::factor(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) return std::nullopt;
  const double scale = a.diagonal().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const auto& l = llt.matrixLLT();
  for (Index j = 0; j < l.rows(); ++j) {
    const double pivot = l(j, j) * l(j, j);
    if (!(pivot >= kSingularityThreshold * scale)) return std::nullopt;
  }
  return SpdFactor(std::move(llt));
}

Vector SpdFactor::squared_distances(const Matrix& rows, const Vector& center) const {
  Matrix centered = (rows.rowwise() - center.transpose()).transpose();
  llt_.matrixL().solveInPlace(centered);
  return centered.colwise().squaredNorm().transpose();
}

double SpdFactor::squared_distance(const Vector& x, const Vector& center) const {
  Vector diff = x - center;
  llt_.matrixL().solveInPlace(diff);
  return diff.squaredNorm();
}

double log_det_spd(const Matrix& a) {
  auto f = SpdFactor::factor(a);
  return f ? f->log_det() : kNegInf;
}

double statistical_distance(const Vector& x, const Vector& mu, const Matrix& sigma) {
  if (x.size() != mu.size() || sigma.rows() != x.size() || sigma.cols() != x.size()) {
    throw DomainError("statistical_distance: dimension mismatch");
  }
  auto f = SpdFactor::factor(sigma);
  if (!f) throw SingularMatrix("statistical_distance: scatter matrix is not positive definite");
  return std::sqrt(f->squared_distance(x, mu));
}

Vector column_means(const Matrix& x) { return x.colwise().mean().transpose(); }

Matrix sample_covariance(const Matrix& x, const Vector& mean) {
  const Matrix centered = x.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
  return 0.5 * (cov + cov.transpose());
}

LocationScatter classical_estimate(const DataMatrix& x) {
  if (x.n() < 2) throw DegenerateData("classical estimate needs at least two rows");
  LocationScatter est;
  est.kind = EstimatorKind::Classical;
  est.center = column_means(x.values());
  est.scatter = sample_covariance(x.values(), est.center);
  est.log_det = log_det_spd(est.scatter);
  est.h = x.n();
  est.alpha = 1.0;
  est.subset.resize(static_cast<std::size_t>(x.n()));
  for (Index i = 0; i < x.n(); ++i) est.subset[static_cast<std::size_t>(i)] = i;
  est.exact_fit = est.log_det == kNegInf;
  return est;
}

Vector mahalanobis_all(const DataMatrix& x) {
  if (x.n() <= x.p()) throw SingularMatrix("mahalanobis_all: need n > p");
  const Vector mean = column_means(x.values());
  auto f = SpdFactor::factor(sample_covariance(x.values(), mean));
  if (!f) throw SingularMatrix("mahalanobis_all: sample covariance is singular");
  return f->squared_distances(x.values(), mean).cwiseSqrt();
}

HSubset subset_stats(const DataMatrix& x, std::vector<Index> indices) {
  std::sort(indices.begin(), indices.end());
  if (indices.size() < 2) throw DomainError("subset_stats: need at least two indices");
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw DomainError("subset_stats: indices must be distinct");
  }
  if (indices.front() < 0 || indices.back() >= x.n()) {
    throw DomainError("subset_stats: index out of range");
  }
  HSubset s;
  const Matrix rows = x.values()(indices, Eigen::all);
  s.mean = column_means(rows);
  s.cov = sample_covariance(rows, s.mean);
  s.log_det = log_det_spd(s.cov);
  s.indices = std::move(indices);
  return s;
}

double consistency_factor_unchecked(double alpha, int p) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("consistency factor: alpha must lie in (0, 1]");
  }
  if (alpha == 1.0) return 1.0;
  const double q = chi2_quantile(alpha, p);
  return alpha / chi2_cdf(q, p + 2);
}

double consistency_factor_raw(double alpha, int p) {
  if (!(alpha >= 0.5 && alpha <= 1.0)) {
    throw DomainError("consistency_factor_raw: alpha must lie in [0.5, 1], got " +
                      std::to_string(alpha));
  }
  return consistency_factor_unchecked(alpha, p);
}

Index default_h(Index n, Index p) { return (n + p + 1) / 2; }

Index h_from_alpha(Index n, Index p, double alpha) {
  if (!(alpha >= 0.5 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0.5, 1], got " + std::to_string(alpha));
  }
  const Index m = default_h(n, p);
  const double h = 2.0 * static_cast<double>(m) - static_cast<double>(n) +
                   2.0 * static_cast<double>(n - m) * alpha;
  return std::min(n, static_cast<Index>(std::floor(h + 1e-9)));
}

}  // namespace robscatter
