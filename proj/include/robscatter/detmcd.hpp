#pragma once

#include <span>
#include <string>
#include <vector>

#include "robscatter/core.hpp"

namespace robscatter {

// Columns centered by their median and divided by their Qn scale.
struct StandardizedData {
  Matrix z;
  Vector medians;
  Vector qn_scales;
};

// Throws ZeroScale carrying the offending column index.
StandardizedData standardize(const DataMatrix& x);

// Which preliminary scatter estimates to build, indexed 1..6.
struct ScatterSelection {
  bool tanh_correlation = true;     // S1
  bool spearman = true;             // S2
  bool normal_scores = true;        // S3
  bool spatial_sign = true;         // S4
  bool smallest_norm_half = true;   // S5
  bool ogk = true;                  // S6
};

struct InitialScatter {
  int k = 0;  // 1..6
  Matrix scatter;
};

// Pearson correlation matrix, or nullopt when a column has zero variance.
std::optional<Matrix> correlation_matrix(const Matrix& x);

// Average ranks (1-based) of one column.
Vector average_ranks(const Eigen::Ref<const Vector>& column);

Matrix spatial_sign_covariance(const Matrix& z);

// Raw orthogonalized Gnanadesikan-Kettenring scatter with Qn as the
// univariate scale. Throws ZeroScale when a pairwise scale vanishes.
Matrix ogk_scatter(const Matrix& z);

// The six preliminary scatter estimates of standardized data. An estimate
// that cannot be formed is skipped and a message appended to warnings.
// Requires p >= 2.
std::vector<InitialScatter> initial_scatters(const StandardizedData& z,
                                             std::vector<std::string>* warnings = nullptr,
                                             const ScatterSelection& which = {});

struct InitialEstimate {
  int k = 0;
  Vector center;
  Matrix scatter;
};

// Replaces the eigenvalues of S by squared Qn scales of the data projected on
// its eigenvectors, and takes the center S^{1/2} comed(Z S^{-1/2}).
// Throws ZeroScale if a projected scale is 0, unless clamp_zero_scales is set,
// in which case eigenvalues are floored at 1e-12 times the largest.
InitialEstimate refine_scatter(const Matrix& z, const InitialScatter& s,
                               bool clamp_zero_scales = false);

struct DetMcdCandidate {
  int k = 0;
  double log_det = kNegInf;  // of the concentrated standardized subset
  std::vector<Index> indices;
  int n_steps = 0;
};

struct DetMcdFit {
  LocationScatter estimate;  // kind RawMCD
  std::vector<DetMcdCandidate> candidates;
};

DetMcdFit det_mcd_fit(const DataMatrix& x, Index h);

LocationScatter det_mcd(const DataMatrix& x, Index h);

// Raw DetMCD for several h; the preliminary estimates are shared.
std::vector<LocationScatter> det_mcd_range(const DataMatrix& x, std::span<const Index> hs);

}  // namespace robscatter
