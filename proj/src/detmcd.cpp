#include "robscatter/detmcd.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <optional>
#include <tuple>

#include "robscatter/cstep.hpp"
#include "robscatter/errors.hpp"
#include "robscatter/fastmcd.hpp"
#include "robscatter/parallel.hpp"
#include "robscatter/robust_scale.hpp"

namespace robscatter {
namespace {

double column_qn(const Matrix& m, Index j) {
  const Vector col = m.col(j);
  return qn_scale(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
}

double column_median(const Matrix& m, Index j) {
  const Vector col = m.col(j);
  return median(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
}

// Rows ordered by Euclidean norm, ties by row values then index.
std::vector<Index> smallest_norm_rows(const Matrix& z, Index count) {
  const DataMatrix view(z);
  const Vector norms = z.rowwise().squaredNorm();
  return select_smallest(norms, count, view, TieBreak::Value);
}

struct Start {
  int k = 0;
  HSubset half;  // the floor(n/2) rows closest to the refined estimate
};

std::vector<Start> prepare_starts(const DataMatrix& zd, const StandardizedData& z,
                                  std::vector<std::string>& warnings) {
  const Index n = zd.n();
  const Index h0 = n / 2;
  const auto scatters = initial_scatters(z, &warnings);

  std::vector<std::optional<Start>> slots(scatters.size());
  std::vector<std::string> slot_warnings(scatters.size());
  parallel_for(scatters.size(), [&](std::size_t idx) {
    const InitialScatter& s = scatters[idx];
    try {
      const InitialEstimate est = refine_scatter(z.z, s);
      auto f = SpdFactor::factor(est.scatter);
      if (!f) {
        slot_warnings[idx] = "S" + std::to_string(s.k) + " refined scatter is singular, skipped";
        return;
      }
      const Vector d2 = f->squared_distances(z.z, est.center);
      HSubset half = subset_stats(zd, select_smallest(d2, h0, zd, TieBreak::Value));
      if (half.singular()) {
        slot_warnings[idx] = "S" + std::to_string(s.k) + " half subset is singular, skipped";
        return;
      }
      slots[idx] = Start{s.k, std::move(half)};
    } catch (const ZeroScale&) {
      slot_warnings[idx] = "S" + std::to_string(s.k) + " has a zero projected Qn scale, skipped";
    }
  });
  std::vector<Start> starts;
  for (std::size_t idx = 0; idx < slots.size(); ++idx) {
    if (!slot_warnings[idx].empty()) warnings.push_back(slot_warnings[idx]);
    if (slots[idx]) starts.push_back(std::move(*slots[idx]));
  }
  if (starts.empty()) throw DegenerateData("det_mcd: every preliminary estimate failed");
  return starts;
}

std::vector<DetMcdCandidate> concentrate_starts(const DataMatrix& zd,
                                                const std::vector<Start>& starts, Index h) {
  std::vector<DetMcdCandidate> out(starts.size());
  parallel_for(starts.size(), [&](std::size_t idx) {
    const Start& s = starts[idx];
    auto f = SpdFactor::factor(s.half.cov);
    const Vector d2 = f->squared_distances(zd.values(), s.half.mean);
    HSubset first = subset_stats(zd, select_smallest(d2, h, zd, TieBreak::Value));
    DetMcdCandidate c;
    c.k = s.k;
    if (first.singular()) {
      c.log_det = kNegInf;
      c.indices = std::move(first.indices);
    } else {
      auto res = concentrate(zd, std::move(first), kDefaultMaxSteps, TieBreak::Value);
      c.log_det = res.subset.log_det;
      c.indices = std::move(res.subset.indices);
      c.n_steps = res.n_steps;
    }
    out[idx] = std::move(c);
  });
  return out;
}

DetMcdFit finish(const DataMatrix& x, const DataMatrix& zd, const StandardizedData& z,
                 const std::vector<Start>& starts, Index h,
                 const std::vector<std::string>& warnings) {
  const Index n = x.n();
  const Index p = x.p();
  DetMcdFit fit;
  fit.candidates = concentrate_starts(zd, starts, h);
  const auto best = std::min_element(
      fit.candidates.begin(), fit.candidates.end(),
      [](const auto& a, const auto& b) { return std::tie(a.log_det, a.k) < std::tie(b.log_det, b.k); });

  const HSubset in_z = subset_stats(zd, best->indices);
  LocationScatter est = raw_estimate_from_subset(in_z, n, p);
  // Back to the original coordinates.
  const auto& d = z.qn_scales;
  est.center = z.medians + d.cwiseProduct(in_z.mean);
  est.scatter = d.asDiagonal() * (in_z.cov * est.c0) * d.asDiagonal();
  if (!est.exact_fit) {
    est.log_det = log_det_spd(est.scatter);
    if (est.log_det == kNegInf) {
      est.log_det = in_z.log_det + static_cast<double>(p) * std::log(est.c0) +
                    2.0 * d.array().log().sum();
    }
  }
  est.warnings.insert(est.warnings.begin(), warnings.begin(), warnings.end());
  if (n <= 5 * p) est.warnings.push_back("n <= 5p: fewer than five observations per dimension");
  fit.estimate = std::move(est);
  return fit;
}

void validate(const DataMatrix& x, Index h) {
  if (x.p() < 2) throw ConfigError("det_mcd requires p >= 2; use uni_mcd for p = 1");
  if (h <= x.p() || h > x.n()) {
    throw ConfigError("det_mcd: h must satisfy p < h <= n");
  }
}

}  // namespace

StandardizedData standardize(const DataMatrix& x) {
  const Matrix& v = x.values();
  StandardizedData out;
  out.medians.resize(x.p());
  out.qn_scales.resize(x.p());
  out.z.resize(x.n(), x.p());
  for (Index j = 0; j < x.p(); ++j) {
    out.medians(j) = column_median(v, j);
    try {
      out.qn_scales(j) = column_qn(v, j);
    } catch (const ZeroScale&) {
      throw ZeroScale("column " + std::to_string(j) + " has zero Qn scale",
                      static_cast<int>(j));
    } catch (const DomainError&) {
      throw ZeroScale("column " + std::to_string(j) + " has fewer than two values",
                      static_cast<int>(j));
    }
    out.z.col(j) = (v.col(j).array() - out.medians(j)) / out.qn_scales(j);
  }
  return out;
}

std::optional<Matrix> correlation_matrix(const Matrix& x) {
  const Vector mean = column_means(x);
  const Matrix cov = sample_covariance(x, mean);
  const Vector sd = cov.diagonal().cwiseSqrt();
  if ((sd.array() <= 0.0).any() || !sd.allFinite()) return std::nullopt;
  const Vector inv = sd.cwiseInverse();
  Matrix corr = inv.asDiagonal() * cov * inv.asDiagonal();
  corr.diagonal().setOnes();
  return corr;
}

Vector average_ranks(const Eigen::Ref<const Vector>& column) {
  const Index n = column.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return column(a) < column(b); });
  Vector ranks(n);
  Index i = 0;
  while (i < n) {
    Index j = i + 1;
    while (j < n && column(order[static_cast<std::size_t>(j)]) ==
                        column(order[static_cast<std::size_t>(i)])) {
      ++j;
    }
    const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (Index t = i; t < j; ++t) ranks(order[static_cast<std::size_t>(t)]) = r;
    i = j;
  }
  return ranks;
}

Matrix spatial_sign_covariance(const Matrix& z) {
  const Index n = z.rows();
  Matrix signs = z;
  for (Index i = 0; i < n; ++i) {
    const double norm = z.row(i).norm();
    if (norm > 0.0) {
      signs.row(i) /= norm;
    } else {
      signs.row(i).setZero();
    }
  }
  Matrix s = (signs.transpose() * signs) / static_cast<double>(n);
  return 0.5 * (s + s.transpose());
}

Matrix ogk_scatter(const Matrix& z) {
  const Index p = z.cols();
  Vector scales(p);
  for (Index j = 0; j < p; ++j) scales(j) = column_qn(z, j);
  const Matrix u = z * scales.cwiseInverse().asDiagonal();

  Matrix r = Matrix::Identity(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index k = j + 1; k < p; ++k) {
      const Vector sum = u.col(j) + u.col(k);
      const Vector diff = u.col(j) - u.col(k);
      const double qs = qn_scale({sum.data(), static_cast<std::size_t>(sum.size())});
      const double qd = qn_scale({diff.data(), static_cast<std::size_t>(diff.size())});
      r(j, k) = r(k, j) = 0.25 * (qs * qs - qd * qd);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(r);
  const Matrix& e = eig.eigenvectors();
  const Matrix projected = u * e;
  Vector gamma(p);
  for (Index j = 0; j < p; ++j) {
    const double q = column_qn(projected, j);
    gamma(j) = q * q;
  }
  const Matrix su = e * gamma.asDiagonal() * e.transpose();
  Matrix s = scales.asDiagonal() * su * scales.asDiagonal();
  return 0.5 * (s + s.transpose());
}

std::vector<InitialScatter> initial_scatters(const StandardizedData& data,
                                             std::vector<std::string>* warnings,
                                             const ScatterSelection& which) {
  const Matrix& z = data.z;
  const Index n = z.rows();
  const Index p = z.cols();
  if (p < 2) throw ConfigError("initial_scatters requires p >= 2");
  const bool needs_full_rank =
      which.tanh_correlation || which.spearman || which.normal_scores || which.ogk;
  if (needs_full_rank && n < p + 1) {
    throw DegenerateData("correlation-based initial scatters require n >= p + 1");
  }
  if (n < 2) throw DegenerateData("initial_scatters requires at least two rows");

  std::vector<InitialScatter> out;
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  auto add_corr = [&](int k, const Matrix& m) {
    if (auto c = correlation_matrix(m)) {
      out.push_back({k, std::move(*c)});
    } else {
      warn("S" + std::to_string(k) + " skipped: a transformed column is constant");
    }
  };

  if (which.tanh_correlation) add_corr(1, z.array().tanh().matrix());

  if (which.spearman || which.normal_scores) {
    Matrix ranks(n, p);
    for (Index j = 0; j < p; ++j) ranks.col(j) = average_ranks(z.col(j));
    if (which.spearman) add_corr(2, ranks);
    if (which.normal_scores) {
      const boost::math::normal standard;
      const double denom = static_cast<double>(n) + 1.0 / 3.0;
      Matrix scores(n, p);
      for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
          scores(i, j) = boost::math::quantile(standard, (ranks(i, j) - 1.0 / 3.0) / denom);
        }
      }
      add_corr(3, scores);
    }
  }

  if (which.spatial_sign) out.push_back({4, spatial_sign_covariance(z)});

  if (which.smallest_norm_half) {
    const Index half = (n + 1) / 2;
    if (half < 2) {
      warn("S5 skipped: fewer than two rows in the smallest-norm half");
    } else {
      const Matrix rows = z(smallest_norm_rows(z, half), Eigen::all);
      out.push_back({5, sample_covariance(rows, column_means(rows))});
    }
  }

  if (which.ogk) {
    try {
      out.push_back({6, ogk_scatter(z)});
    } catch (const ZeroScale&) {
      warn("S6 skipped: zero pairwise Qn scale");
    }
  }
  return out;
}

InitialEstimate refine_scatter(const Matrix& z, const InitialScatter& s, bool clamp_zero_scales) {
  const Index p = z.cols();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s.scatter + s.scatter.transpose()));
  if (eig.info() != Eigen::Success) {
    throw ZeroScale("refine_scatter: eigendecomposition failed");
  }
  const Matrix& e = eig.eigenvectors();
  const Matrix v = z * e;
  Vector lambda(p);
  for (Index j = 0; j < p; ++j) {
    double q = 0.0;
    try {
      q = column_qn(v, j);
    } catch (const ZeroScale&) {
      if (!clamp_zero_scales) throw;
    }
    lambda(j) = q * q;
  }
  const double top = lambda.maxCoeff();
  if (!(top > 0.0)) throw ZeroScale("refine_scatter: all projected scales are zero");
  if (clamp_zero_scales) lambda = lambda.cwiseMax(kSingularityThreshold * top);

  InitialEstimate out;
  out.k = s.k;
  out.scatter = e * lambda.asDiagonal() * e.transpose();
  out.scatter = 0.5 * (out.scatter + out.scatter.transpose());

  // Symmetric square roots from the same eigenbasis, eigenvalues floored.
  const Vector floored = lambda.cwiseMax(kSingularityThreshold * top);
  const Matrix root = e * floored.cwiseSqrt().asDiagonal() * e.transpose();
  const Matrix inv_root = e * floored.cwiseSqrt().cwiseInverse().asDiagonal() * e.transpose();
  const Matrix w = z * inv_root;
  Vector comed(p);
  for (Index j = 0; j < p; ++j) comed(j) = column_median(w, j);
  out.center = root * comed;
  return out;
}

DetMcdFit det_mcd_fit(const DataMatrix& x, Index h) {
  validate(x, h);
  const StandardizedData z = standardize(x);
  const DataMatrix zd(z.z);
  std::vector<std::string> warnings;
  const auto starts = prepare_starts(zd, z, warnings);
  return finish(x, zd, z, starts, h, warnings);
}

LocationScatter det_mcd(const DataMatrix& x, Index h) { return det_mcd_fit(x, h).estimate; }

std::vector<LocationScatter> det_mcd_range(const DataMatrix& x, std::span<const Index> hs) {
  for (const Index h : hs) validate(x, h);
  const StandardizedData z = standardize(x);
  const DataMatrix zd(z.z);
  std::vector<std::string> warnings;
  const auto starts = prepare_starts(zd, z, warnings);
  std::vector<LocationScatter> out;
  out.reserve(hs.size());
  for (const Index h : hs) out.push_back(finish(x, zd, z, starts, h, warnings).estimate);
  return out;
}

}  // namespace robscatter
