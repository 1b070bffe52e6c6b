#include "robscatter/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "robscatter/detmcd.hpp"
#include "robscatter/errors.hpp"
#include "robscatter/fastmcd.hpp"
#include "robscatter/parallel.hpp"
#include "robscatter/reweight.hpp"

namespace robscatter {
namespace {

// Jackknife ratio of pooled variances. a and b hold one row per replication.
std::pair<double, double> variance_ratio(const Matrix& a, const Matrix& b) {
  const Index r = a.rows();
  const double rd = static_cast<double>(r);
  const Vector sa = a.colwise().sum();
  const Vector sb = b.colwise().sum();
  const Vector qa = a.array().square().colwise().sum();
  const Vector qb = b.array().square().colwise().sum();
  auto pooled = [](const Vector& s, const Vector& q, double m) {
    return ((q.array() - s.array().square() / m) / (m - 1.0)).sum();
  };
  const double full = pooled(sa, qa, rd) / pooled(sb, qb, rd);
  std::vector<double> loo(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) {
    const Vector ra = a.row(i).transpose();
    const Vector rb = b.row(i).transpose();
    loo[static_cast<std::size_t>(i)] =
        pooled(sa - ra, qa - ra.cwiseAbs2(), rd - 1.0) / pooled(sb - rb, qb - rb.cwiseAbs2(), rd - 1.0);
  }
  double mean = 0.0;
  for (const double v : loo) mean += v;
  mean /= rd;
  double ss = 0.0;
  for (const double v : loo) ss += (v - mean) * (v - mean);
  return {full, std::sqrt((rd - 1.0) / rd * ss)};
}

LocationScatter raw_fit(const DataMatrix& x, Index h, BenchEstimator est, int n_starts,
                        std::uint64_t seed) {
  if (est == BenchEstimator::DetMcd && x.p() >= 2) return det_mcd(x, h);
  FastMcdConfig cfg;
  cfg.h = h;
  cfg.n_starts = n_starts;
  cfg.n_keep = std::min(10, n_starts);
  cfg.seed = seed;
  return fast_mcd(x, cfg);
}

double cross(const Vector& o, const Vector& a, const Vector& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

}  // namespace

Matrix standard_normal_matrix(Index n, Index p, CounterRng& rng) {
  Matrix m(n, p);
  double* data = m.data();
  const Index total = n * p;
  for (Index k = 0; k < total; k += 2) {
    double u1 = rng.uniform01();
    while (u1 <= 0.0) u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    data[k] = radius * std::cos(2.0 * std::numbers::pi * u2);
    if (k + 1 < total) data[k + 1] = radius * std::sin(2.0 * std::numbers::pi * u2);
  }
  return m;
}

EfficiencyResult bench_efficiency(const EfficiencyConfig& cfg) {
  if (cfg.reps < 3) throw ConfigError("bench_efficiency: need at least 3 replications");
  if (static_cast<double>(cfg.n) * cfg.reps > 1e7) {
    throw ConfigError("bench_efficiency: n * reps must not exceed 1e7");
  }
  const Index h = cfg.h.value_or(h_from_alpha(cfg.n, cfg.p, cfg.alpha));
  const auto reps = static_cast<std::size_t>(cfg.reps);
  Matrix classical(cfg.reps, cfg.p);
  Matrix raw(cfg.reps, cfg.p);
  Matrix weighted(cfg.reps, cfg.p);
  parallel_for(reps, [&](std::size_t r) {
    CounterRng rng(cfg.seed, r);
    const DataMatrix x(standard_normal_matrix(cfg.n, cfg.p, rng));
    const auto row = static_cast<Index>(r);
    classical.row(row) = classical_estimate(x).scatter.diagonal().transpose();
    const LocationScatter est =
        raw_fit(x, h, cfg.estimator, cfg.n_starts, splitmix64_mix(cfg.seed + 0x5eed + r));
    raw.row(row) = est.scatter.diagonal().transpose();
    weighted.row(row) = reweight(x, est).scatter.diagonal().transpose();
  });
  EfficiencyResult out;
  out.h = h;
  out.reps = cfg.reps;
  std::tie(out.raw, out.raw_se) = variance_ratio(classical, raw);
  std::tie(out.weighted, out.weighted_se) = variance_ratio(classical, weighted);
  return out;
}

bool inside_inflated_hull(const Matrix& points, const Vector& point, double factor) {
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) pts.emplace_back(points.row(i).transpose());
  const Vector centroid = column_means(points);
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  // Andrew's monotone chain, counter-clockwise.
  std::vector<Vector> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& pt : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pt) <= 0) --k;
    hull[k++] = pt;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  const Vector shrunk = centroid + (point - centroid) / factor;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (cross(hull[i], hull[(i + 1) % hull.size()], shrunk) < 0) return false;
  }
  return true;
}

BreakdownResult bench_breakdown(const BreakdownConfig& cfg) {
  if (cfg.p != 2) throw ConfigError("bench_breakdown: only p = 2 is supported");
  BreakdownResult out;
  out.trials = cfg.trials;
  out.scattered_count = cfg.h - cfg.p;
  out.clustered_count = cfg.n - cfg.h + 1;
  std::vector<int> held(static_cast<std::size_t>(cfg.trials), 0);
  std::vector<int> broken(static_cast<std::size_t>(cfg.trials), 0);
  std::vector<int> degenerate(static_cast<std::size_t>(cfg.trials), 0);

  FastMcdConfig fcfg;
  fcfg.h = cfg.h;
  fcfg.n_starts = cfg.n_starts;

  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t t) {
    CounterRng rng(cfg.seed, t);
    const Matrix clean = standard_normal_matrix(cfg.n, cfg.p, rng);
    std::vector<Index> order(static_cast<std::size_t>(cfg.n));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = cfg.n - 1; i > 0; --i) {
      std::swap(order[static_cast<std::size_t>(i)],
                order[rng.uniform(static_cast<std::uint64_t>(i + 1))]);
    }
    auto run = [&](Index m, bool clustered) {
      Matrix x = clean;
      const double base_angle = 2.0 * std::numbers::pi * rng.uniform01();
      const Matrix noise = standard_normal_matrix(m, cfg.p, rng);
      for (Index r = 0; r < m; ++r) {
        const double angle = clustered ? base_angle : 2.0 * std::numbers::pi * rng.uniform01();
        Eigen::Vector2d pt(std::cos(angle), std::sin(angle));
        pt *= cfg.distance;
        if (clustered) pt += cfg.cluster_sd * noise.row(r).transpose();
        x.row(order[static_cast<std::size_t>(r)]) = pt.transpose();
      }
      std::vector<Index> kept(order.begin() + m, order.end());
      FastMcdConfig local = fcfg;
      local.seed = splitmix64_mix(cfg.seed ^ (t * 2 + (clustered ? 1 : 0)));
      std::optional<Vector> center;
      try {
        center = fast_mcd(DataMatrix(x), local).center;
      } catch (const DegenerateData&) {
        // the whole sample fails the singularity rule
        ++degenerate[t];
      }
      return std::pair{center, Matrix(clean(kept, Eigen::all))};
    };
    {
      const auto [center, rest] = run(out.scattered_count, false);
      held[t] = center && inside_inflated_hull(rest, *center, 2.0) ? 1 : 0;
    }
    {
      const auto [center, rest] = run(out.clustered_count, true);
      broken[t] = center && (*center - column_means(rest)).norm() > 1e3 ? 1 : 0;
    }
  });
  for (std::size_t t = 0; t < held.size(); ++t) {
    out.held += held[t];
    out.broken += broken[t];
    out.degenerate += degenerate[t];
  }
  return out;
}

EquivarianceResult bench_detmcd_equivariance(const EquivarianceConfig& cfg) {
  EquivarianceResult out;
  out.trials = cfg.trials;
  std::vector<double> center_dev(static_cast<std::size_t>(cfg.trials));
  std::vector<double> scatter_dev(static_cast<std::size_t>(cfg.trials));
  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t t) {
    CounterRng rng(cfg.seed, t);
    const Matrix x = standard_normal_matrix(cfg.n, cfg.p, rng);
    const Matrix a = standard_normal_matrix(cfg.p, cfg.p, rng) +
                     Matrix::Identity(cfg.p, cfg.p) * static_cast<double>(cfg.p);
    const Vector b = standard_normal_matrix(cfg.p, 1, rng).col(0) * 10.0;
    const Index h = default_h(cfg.n, cfg.p);
    const LocationScatter base = det_mcd(DataMatrix(x), h);
    const Matrix xt = (x * a.transpose()).rowwise() + b.transpose();
    const LocationScatter moved = det_mcd(DataMatrix(xt), h);
    const Vector expect_center = a * base.center + b;
    const Matrix expect_scatter = a * base.scatter * a.transpose();
    center_dev[t] = (moved.center - expect_center).norm() / expect_center.norm();
    scatter_dev[t] = (moved.scatter - expect_scatter).norm() / expect_scatter.norm();
  });
  for (std::size_t t = 0; t < center_dev.size(); ++t) {
    out.mean_center_dev += center_dev[t] / cfg.trials;
    out.mean_scatter_dev += scatter_dev[t] / cfg.trials;
    out.max_center_dev = std::max(out.max_center_dev, center_dev[t]);
    out.max_scatter_dev = std::max(out.max_scatter_dev, scatter_dev[t]);
  }
  return out;
}

}  // namespace robscatter
