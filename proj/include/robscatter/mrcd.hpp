#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robscatter/core.hpp"

namespace robscatter {

enum class TargetKind { Identity, Equicorrelation };

struct MrcdConfig {
  std::optional<Index> h;      // defaults to ceil(0.75 n)
  std::optional<double> rho;   // nullopt selects rho automatically
  TargetKind target = TargetKind::Identity;
  int max_steps = 200;
};

// Clamp applied to the robust equicorrelation coefficient.
inline constexpr double kMaxEquicorrelation = 0.99;

// Median over column pairs of the Qn-based correlation
// (Qn(u+v)^2 - Qn(u-v)^2) / (Qn(u+v)^2 + Qn(u-v)^2) of standardized columns,
// clamped to [-0.99, 0.99] and above -0.99 / (p - 1) to keep the target SPD.
double equicorrelation_coefficient(const DataMatrix& x);

// Identity, or the unit-diagonal equicorrelation matrix (needs p >= 2).
Matrix target_matrix(const DataMatrix& x, TargetKind kind);

// rho T + (1 - rho) cov.
Matrix regularized_cov(const Matrix& cov, const Matrix& target, double rho);

// Smallest rho in {0.01, ..., 1.00} whose regularized matrix has condition
// number <= 1000. Returns 1 if no grid value qualifies.
double auto_rho(const Matrix& cov, const Matrix& target, bool target_is_identity);

struct MrcdStart {
  int k = 0;  // 0 = smallest-norm fallback, 1..6 = preliminary scatter S_k
  // log det(rho T + (1 - rho) Cov(X_H)) of the start and after every step,
  // including a final step that was not accepted.
  std::vector<double> objective_trace;
  std::vector<Index> indices;
  double objective = 0.0;  // of the accepted final subset
};

struct MrcdResult {
  Vector location;
  Matrix regularized_scatter;  // rho T + (1 - rho) c0 Cov(X_H)
  HSubset subset;
  double rho_used = 0.0;
  double alpha = 1.0;  // h / n
  double c0 = 1.0;
  double objective = 0.0;  // log det(rho T + (1 - rho) Cov(X_H))
  double log_det = 0.0;    // log det(regularized_scatter)
  Matrix target;
  std::vector<MrcdStart> starts;
  int best_start = 0;
  std::vector<std::string> warnings;

  LocationScatter as_location_scatter() const;
};

// Modified C-steps from one h-subset: distances use rho T + (1 - rho) Cov(X_H)
// of the current subset. Stops when the subset repeats, the objective does not
// decrease, or after max_steps steps. k of the result is 0.
MrcdStart mrcd_concentrate(const DataMatrix& x, std::vector<Index> start, const Matrix& target,
                           double rho, int max_steps = 200);

MrcdResult mrcd(const DataMatrix& x, const MrcdConfig& config = {});

}  // namespace robscatter
