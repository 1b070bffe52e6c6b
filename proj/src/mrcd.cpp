#include "robscatter/mrcd.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <tuple>

#include "robscatter/cstep.hpp"
#include "robscatter/detmcd.hpp"
#include "robscatter/errors.hpp"
#include "robscatter/parallel.hpp"
#include "robscatter/robust_scale.hpp"

namespace robscatter {
namespace {

constexpr double kMaxCondition = 1000.0;

double qn_or_zero(const Vector& v) {
  try {
    return qn_scale({v.data(), static_cast<std::size_t>(v.size())});
  } catch (const ZeroScale&) {
    return 0.0;
  }
}

Matrix equicorrelation(Index p, double r) {
  Matrix t = Matrix::Constant(p, p, r);
  t.diagonal().setOnes();
  return t;
}

struct Objective {
  double value = kNegInf;
  std::optional<SpdFactor> factor;
};

Objective objective_of(const HSubset& s, const Matrix& target, double rho) {
  Objective o;
  o.factor = SpdFactor::factor(regularized_cov(s.cov, target, rho));
  if (!o.factor) {
    throw SingularMatrix("mrcd: regularized covariance is not positive definite");
  }
  o.value = o.factor->log_det();
  return o;
}

// Deterministic h-subsets from the standardized data.
std::vector<std::pair<int, std::vector<Index>>> deterministic_starts(
    const StandardizedData& z, const DataMatrix& zd, std::vector<Index> fallback, Index h,
    double rho, TargetKind kind, double r, std::vector<std::string>& warnings) {
  const Index n = zd.n();
  const Index p = zd.p();
  const Matrix target_z =
      kind == TargetKind::Identity ? Matrix::Identity(p, p) : equicorrelation(p, r);

  std::vector<std::pair<int, std::vector<Index>>> starts;
  starts.emplace_back(0, std::move(fallback));
  if (p < 2 || n < 4) return starts;

  ScatterSelection which;
  const bool full_rank = n > p;
  which.tanh_correlation = which.spearman = which.normal_scores = which.ogk = full_rank;
  const auto scatters = initial_scatters(z, &warnings, which);

  const Index h0 = std::max<Index>(2, n / 2);
  std::vector<std::optional<std::vector<Index>>> slots(scatters.size());
  parallel_for(scatters.size(), [&](std::size_t idx) {
    try {
      const InitialEstimate est = refine_scatter(z.z, scatters[idx], true);
      auto f = SpdFactor::factor(regularized_cov(est.scatter, target_z, rho));
      if (!f) return;
      const HSubset half = subset_stats(
          zd, select_smallest(f->squared_distances(z.z, est.center), h0, zd, TieBreak::Value));
      auto g = SpdFactor::factor(regularized_cov(half.cov, target_z, rho));
      if (!g) return;
      slots[idx] = select_smallest(g->squared_distances(z.z, half.mean), h, zd, TieBreak::Value);
    } catch (const ZeroScale&) {
      // dropped below
    }
  });
  for (std::size_t idx = 0; idx < scatters.size(); ++idx) {
    if (slots[idx]) {
      starts.emplace_back(scatters[idx].k, std::move(*slots[idx]));
    } else {
      warnings.push_back("S" + std::to_string(scatters[idx].k) + " start skipped");
    }
  }
  return starts;
}

}  // namespace

double equicorrelation_coefficient(const DataMatrix& x) {
  const Index p = x.p();
  if (p < 2) throw ConfigError("equicorrelation target requires p >= 2");
  const StandardizedData z = standardize(x);
  std::vector<double> pair_corr;
  pair_corr.reserve(static_cast<std::size_t>(p * (p - 1) / 2));
  for (Index j = 0; j < p; ++j) {
    for (Index k = j + 1; k < p; ++k) {
      const Vector u = z.z.col(j) / qn_or_zero(z.z.col(j));
      const Vector v = z.z.col(k) / qn_or_zero(z.z.col(k));
      const double qs = qn_or_zero(u + v);
      const double qd = qn_or_zero(u - v);
      const double s2 = qs * qs;
      const double d2 = qd * qd;
      if (!(s2 + d2 > 0.0)) throw ZeroScale("equicorrelation: degenerate column pair");
      pair_corr.push_back((s2 - d2) / (s2 + d2));
    }
  }
  const double lower = std::max(-kMaxEquicorrelation,
                                -kMaxEquicorrelation / static_cast<double>(p - 1));
  return std::clamp(median(pair_corr), lower, kMaxEquicorrelation);
}

Matrix target_matrix(const DataMatrix& x, TargetKind kind) {
  if (kind == TargetKind::Identity) return Matrix::Identity(x.p(), x.p());
  return equicorrelation(x.p(), equicorrelation_coefficient(x));
}

Matrix regularized_cov(const Matrix& cov, const Matrix& target, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("regularized_cov: rho must lie in (0, 1]");
  Matrix m = rho * target + (1.0 - rho) * cov;
  return 0.5 * (m + m.transpose());
}

double auto_rho(const Matrix& cov, const Matrix& target, bool target_is_identity) {
  auto condition = [](const Vector& ev) { return ev.maxCoeff() / ev.minCoeff(); };
  Vector cov_ev;
  if (target_is_identity) {
    cov_ev = Eigen::SelfAdjointEigenSolver<Matrix>(cov, Eigen::EigenvaluesOnly).eigenvalues();
  }
  for (int g = 1; g <= 100; ++g) {
    const double rho = g / 100.0;
    Vector ev;
    if (target_is_identity) {
      ev = (rho + (1.0 - rho) * cov_ev.array().max(0.0)).matrix();
    } else {
      ev = Eigen::SelfAdjointEigenSolver<Matrix>(regularized_cov(cov, target, rho),
                                                 Eigen::EigenvaluesOnly)
               .eigenvalues();
    }
    if (ev.minCoeff() > 0.0 && condition(ev) <= kMaxCondition) return rho;
  }
  return 1.0;
}

LocationScatter MrcdResult::as_location_scatter() const {
  LocationScatter est;
  est.kind = EstimatorKind::MRCD;
  est.center = location;
  est.scatter = regularized_scatter;
  est.log_det = log_det;
  est.h = subset.h();
  est.alpha = alpha;
  est.c0 = c0;
  est.consistency_applied = true;
  est.subset = subset.indices;
  est.warnings = warnings;
  return est;
}

MrcdStart mrcd_concentrate(const DataMatrix& x, std::vector<Index> start, const Matrix& target,
                           double rho, int max_steps) {
  MrcdStart out;
  HSubset current = subset_stats(x, std::move(start));
  Objective obj = objective_of(current, target, rho);
  out.objective_trace.push_back(obj.value);
  for (int step = 0; step < max_steps; ++step) {
    const Vector d2 = obj.factor->squared_distances(x.values(), current.mean);
    std::vector<Index> next_idx = select_smallest(d2, current.h(), x, TieBreak::Value);
    if (next_idx == current.indices) break;
    HSubset next = subset_stats(x, std::move(next_idx));
    Objective next_obj = objective_of(next, target, rho);
    out.objective_trace.push_back(next_obj.value);
    if (!(next_obj.value < obj.value)) break;
    current = std::move(next);
    obj = std::move(next_obj);
  }
  out.indices = current.indices;
  out.objective = obj.value;
  return out;
}

MrcdResult mrcd(const DataMatrix& x, const MrcdConfig& config) {
  const Index n = x.n();
  const Index p = x.p();
  const Index h = config.h.value_or((3 * n + 3) / 4);
  if (h < 2 || h > n) throw ConfigError("mrcd: h must satisfy 2 <= h <= n");
  if (config.rho && !(*config.rho > 0.0 && *config.rho <= 1.0)) {
    throw ConfigError("mrcd: rho must lie in (0, 1]");
  }
  if (config.max_steps < 1) throw ConfigError("mrcd: max_steps must be >= 1");

  MrcdResult result;
  result.target = target_matrix(x, config.target);
  const double r = config.target == TargetKind::Equicorrelation ? result.target(0, 1) : 0.0;

  // rho is fixed before the starts are built, from the fallback subset.
  const StandardizedData z = standardize(x);
  const DataMatrix zd(z.z);
  const HSubset fallback =
      subset_stats(x, select_smallest(z.z.rowwise().squaredNorm(), h, zd, TieBreak::Value));
  result.rho_used = config.rho.value_or(
      auto_rho(fallback.cov, result.target, config.target == TargetKind::Identity));

  auto starts = deterministic_starts(z, zd, fallback.indices, h, result.rho_used, config.target,
                                     r, result.warnings);
  result.starts.resize(starts.size());
  parallel_for(starts.size(), [&](std::size_t idx) {
    result.starts[idx] = mrcd_concentrate(x, std::move(starts[idx].second), result.target,
                                          result.rho_used, config.max_steps);
    result.starts[idx].k = starts[idx].first;
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.starts.size(); ++i) {
    if (result.starts[i].objective < result.starts[best].objective) best = i;
  }
  result.best_start = static_cast<int>(best);
  result.subset = subset_stats(x, result.starts[best].indices);
  result.location = result.subset.mean;
  result.alpha = static_cast<double>(h) / static_cast<double>(n);
  result.c0 = consistency_factor_unchecked(result.alpha, static_cast<int>(p));
  result.objective = result.starts[best].objective;
  result.regularized_scatter =
      regularized_cov(result.c0 * result.subset.cov, result.target, result.rho_used);
  result.log_det = log_det_spd(result.regularized_scatter);
  if (n <= p) result.warnings.push_back("n <= p: only the spatial-sign and smallest-norm starts are used");
  return result;
}

}  // namespace robscatter
