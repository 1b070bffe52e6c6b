#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace robscatter {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Relative pivot below which a factorization is declared singular.
inline constexpr double kSingularityThreshold = 1e-12;

// n x p observations, rows are cases. Every entry is finite.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values, std::vector<std::string> column_names = {});

  const Matrix& values() const noexcept { return values_; }
  Index n() const noexcept { return values_.rows(); }
  Index p() const noexcept { return values_.cols(); }
  const std::vector<std::string>& column_names() const noexcept { return column_names_; }

  auto row(Index i) const { return values_.row(i); }

 private:
  Matrix values_;
  std::vector<std::string> column_names_;
};

enum class EstimatorKind { RawMCD, WeightedMCD, UniMCD, MRCD, Classical };

const char* to_string(EstimatorKind kind);

// Location/scatter estimate plus the provenance needed to interpret it.
struct LocationScatter {
  Vector center;
  Matrix scatter;
  double log_det = 0.0;  // log|scatter|, -inf for a singular scatter
  EstimatorKind kind = EstimatorKind::Classical;
  Index h = 0;
  double alpha = 1.0;
  bool consistency_applied = false;
  double c0 = 1.0;
  double c1 = 1.0;
  // Rows of the optimal h-subset (raw estimators) or with weight 1 (weighted).
  std::vector<Index> subset;
  // The optimal h-subset lies on a hyperplane. The scatter is then singular.
  bool exact_fit = false;
  std::vector<std::string> warnings;
};

// An h-subset with its sample mean, covariance (divisor h - 1) and log|cov|.
struct HSubset {
  std::vector<Index> indices;  // sorted, distinct
  Vector mean;
  Matrix cov;
  double log_det = kNegInf;

  Index h() const noexcept { return static_cast<Index>(indices.size()); }
  bool singular() const noexcept { return log_det == kNegInf; }
};

// Cholesky factor of a symmetric positive definite matrix with the
// library-wide singularity rule: a squared pivot below 1e-12 times the largest
// diagonal entry marks the matrix singular.
class SpdFactor {
 public:
  static std::optional<SpdFactor> factor(const Matrix& a);

  Index dim() const noexcept { return llt_.matrixLLT().rows(); }
  double log_det() const noexcept { return log_det_; }

  // Squared distances (x_i - center)' A^{-1} (x_i - center) of every row.
  Vector squared_distances(const Matrix& rows, const Vector& center) const;
  double squared_distance(const Vector& x, const Vector& center) const;

 private:
  explicit SpdFactor(Eigen::LLT<Matrix> llt);

  Eigen::LLT<Matrix> llt_;
  double log_det_ = 0.0;
};

// log|a| via the factorization above, or -inf when a is singular.
double log_det_spd(const Matrix& a);

// sqrt((x-mu)' sigma^{-1} (x-mu)). Throws SingularMatrix for non-PD sigma.
double statistical_distance(const Vector& x, const Vector& mu, const Matrix& sigma);

Vector column_means(const Matrix& x);
// Sample covariance with divisor n - 1.
Matrix sample_covariance(const Matrix& x, const Vector& mean);

// Classical mean and covariance (divisor n - 1).
LocationScatter classical_estimate(const DataMatrix& x);

// Mahalanobis distance of every row from the classical mean and covariance.
Vector mahalanobis_all(const DataMatrix& x);

HSubset subset_stats(const DataMatrix& x, std::vector<Index> indices);

// c0 = alpha / F_{chi2, p+2}(q_alpha), q_alpha the alpha-quantile of chi2_p.
// alpha must lie in [0.5, 1].
double consistency_factor_raw(double alpha, int p);

// Same formula without the alpha >= 0.5 restriction; alpha in (0, 1].
double consistency_factor_unchecked(double alpha, int p);

// Most robust choice, floor((n + p + 1) / 2).
Index default_h(Index n, Index p);

// h for a trimming fraction alpha in [0.5, 1]:
// floor(2 m - n + 2 (n - m) alpha) with m = default_h(n, p).
Index h_from_alpha(Index n, Index p, double alpha);

}  // namespace robscatter
