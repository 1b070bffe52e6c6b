#include "robscatter/fastmcd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "robscatter/cstep.hpp"
#include "robscatter/errors.hpp"
#include "robscatter/parallel.hpp"

namespace robscatter {
namespace {

struct Candidate {
  double log_det = kNegInf;
  std::size_t start = 0;
  HSubset subset;
};

bool better(const Candidate& a, const Candidate& b) {
  return std::tie(a.log_det, a.start) < std::tie(b.log_det, b.start);
}

HSubset screen(const DataMatrix& x, HSubset subset, int steps) {
  for (int s = 0; s < steps && !subset.singular(); ++s) subset = c_step(x, subset);
  return subset;
}

std::vector<Candidate> keep_best(std::vector<Candidate> all, int n_keep) {
  const auto keep = std::min<std::size_t>(all.size(), static_cast<std::size_t>(n_keep));
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    better);
  all.resize(keep);
  return all;
}

std::vector<Candidate> screen_starts(const DataMatrix& x, Index h, std::size_t n_starts,
                                     std::uint64_t seed, std::size_t stream_offset,
                                     int screen_steps) {
  std::vector<Candidate> out(n_starts);
  parallel_for(n_starts, [&](std::size_t s) {
    CounterRng rng(seed, stream_offset + s);
    Candidate c;
    c.start = stream_offset + s;
    c.subset = screen(x, initial_subset(x, h, rng), screen_steps);
    c.log_det = c.subset.log_det;
    out[s] = std::move(c);
  });
  return out;
}

// Rows split round-robin into ceil(n / 300) groups; screening runs inside each
// group and the pooled winners are re-screened on the full data.
std::vector<Candidate> partitioned_screen(const DataMatrix& x, Index h,
                                          const FastMcdConfig& cfg) {
  constexpr Index kGroupSize = 300;
  const Index n = x.n();
  const Index p = x.p();
  const Index groups = (n + kGroupSize - 1) / kGroupSize;
  const auto per_group =
      static_cast<std::size_t>((cfg.n_starts + groups - 1) / groups);

  std::vector<Candidate> pooled;
  for (Index g = 0; g < groups; ++g) {
    std::vector<Index> rows;
    for (Index i = g; i < n; i += groups) rows.push_back(i);
    const auto ng = static_cast<Index>(rows.size());
    const DataMatrix sub(x.values()(rows, Eigen::all));
    const Index hg = std::clamp<Index>((h * ng + n - 1) / n, p + 1, ng);
    auto screened = screen_starts(sub, hg, per_group, cfg.seed,
                                  static_cast<std::size_t>(g) * per_group, cfg.screen_steps);
    for (auto& c : keep_best(std::move(screened), cfg.n_keep)) pooled.push_back(std::move(c));
  }

  std::vector<Candidate> merged(pooled.size());
  parallel_for(pooled.size(), [&](std::size_t k) {
    const Candidate& c = pooled[k];
    Candidate m;
    m.start = c.start;
    auto f = SpdFactor::factor(c.subset.cov);
    if (!f) {
      // A singular group subset still seeds the full data through its mean.
      const Vector d2 = (x.values().rowwise() - c.subset.mean.transpose())
                            .rowwise()
                            .squaredNorm()
                            .transpose();
      m.subset = subset_stats(x, select_smallest(d2, h, x));
    } else {
      m.subset = subset_stats(x, select_smallest(f->squared_distances(x.values(), c.subset.mean),
                                                 h, x));
    }
    m.subset = screen(x, std::move(m.subset), cfg.screen_steps);
    m.log_det = m.subset.log_det;
    merged[k] = std::move(m);
  });
  return merged;
}

void validate(const DataMatrix& x, Index h, const FastMcdConfig& cfg) {
  if (h <= x.p() || h > x.n()) {
    throw ConfigError("fast_mcd: h must satisfy p < h <= n (h=" + std::to_string(h) +
                      ", n=" + std::to_string(x.n()) + ", p=" + std::to_string(x.p()) + ")");
  }
  if (cfg.n_starts < 1 || cfg.n_keep < 1 || cfg.n_keep > cfg.n_starts) {
    throw ConfigError("fast_mcd: need 1 <= n_keep <= n_starts");
  }
  if (cfg.screen_steps < 1) throw ConfigError("fast_mcd: screen_steps must be >= 1");
  if (cfg.max_steps < 1) throw ConfigError("fast_mcd: max_steps must be >= 1");
}

}  // namespace

HSubset initial_subset(const DataMatrix& x, Index h, CounterRng& rng) {
  const Index n = x.n();
  const Index p = x.p();
  if (n < p + 1) throw DegenerateData("initial_subset: need n >= p + 1");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});

  // Partial Fisher-Yates: perm[0..taken) holds the drawn rows.
  Index taken = 0;
  auto draw_one = [&] {
    const auto j = taken + static_cast<Index>(rng.uniform(static_cast<std::uint64_t>(n - taken)));
    std::swap(perm[static_cast<std::size_t>(taken)], perm[static_cast<std::size_t>(j)]);
    ++taken;
  };
  while (taken < p + 1) draw_one();

  HSubset elemental = subset_stats(x, {perm.begin(), perm.begin() + taken});
  std::optional<SpdFactor> f = SpdFactor::factor(elemental.cov);
  while (!f) {
    if (taken == n) {
      throw DegenerateData("initial_subset: all rows lie on one hyperplane");
    }
    draw_one();
    elemental = subset_stats(x, {perm.begin(), perm.begin() + taken});
    f = SpdFactor::factor(elemental.cov);
  }
  return subset_stats(x, select_smallest(f->squared_distances(x.values(), elemental.mean), h, x));
}

LocationScatter raw_estimate_from_subset(const HSubset& best, Index n, Index p) {
  LocationScatter est;
  est.kind = EstimatorKind::RawMCD;
  est.h = best.h();
  est.alpha = static_cast<double>(best.h()) / static_cast<double>(n);
  est.c0 = consistency_factor_unchecked(est.alpha, static_cast<int>(p));
  est.consistency_applied = true;
  est.center = best.mean;
  est.scatter = best.cov * est.c0;
  est.subset = best.indices;
  est.exact_fit = best.singular();
  est.log_det = est.exact_fit ? kNegInf
                              : best.log_det + static_cast<double>(p) * std::log(est.c0);
  if (est.exact_fit) {
    est.warnings.push_back("exact fit: the optimal h-subset lies on an affine hyperplane");
  }
  return est;
}

FastMcdFit fast_mcd_fit(const DataMatrix& x, const FastMcdConfig& config) {
  const Index n = x.n();
  const Index p = x.p();
  const Index h = config.h.value_or(default_h(n, p));
  validate(x, h, config);

  FastMcdFit fit;
  std::vector<std::string> warnings;
  if (n <= 5 * p) {
    warnings.push_back("n <= 5p: fewer than five observations per dimension");
  }

  if (h == n) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    fit.trace.best = subset_stats(x, std::move(all));
    fit.trace.best_start = 0;
    fit.estimate = raw_estimate_from_subset(fit.trace.best, n, p);
    fit.estimate.warnings.insert(fit.estimate.warnings.begin(), warnings.begin(), warnings.end());
    return fit;
  }

  std::vector<Candidate> screened;
  if (config.partition_threshold && n > *config.partition_threshold) {
    screened = partitioned_screen(x, h, config);
  } else {
    screened = screen_starts(x, h, static_cast<std::size_t>(config.n_starts), config.seed, 0,
                             config.screen_steps);
  }
  fit.trace.screened_log_dets.reserve(screened.size());
  for (const auto& c : screened) fit.trace.screened_log_dets.push_back(c.log_det);

  std::vector<Candidate> kept = keep_best(std::move(screened), config.n_keep);
  parallel_for(kept.size(), [&](std::size_t k) {
    if (kept[k].subset.singular()) return;
    auto res = concentrate(x, std::move(kept[k].subset), config.max_steps);
    kept[k].subset = std::move(res.subset);
    kept[k].log_det = kept[k].subset.log_det;
  });
  for (const auto& c : kept) fit.trace.refined_log_dets.push_back(c.log_det);

  const auto best = std::min_element(kept.begin(), kept.end(), better);
  fit.trace.best_start = static_cast<int>(best->start);
  fit.trace.best = best->subset;
  fit.estimate = raw_estimate_from_subset(fit.trace.best, n, p);
  fit.estimate.warnings.insert(fit.estimate.warnings.begin(), warnings.begin(), warnings.end());
  return fit;
}

LocationScatter fast_mcd(const DataMatrix& x, const FastMcdConfig& config) {
  return fast_mcd_fit(x, config).estimate;
}

}  // namespace robscatter
