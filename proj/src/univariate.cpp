#include "robscatter/univariate.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <cmath>
#include <numeric>
#include <vector>

#include "robscatter/errors.hpp"

namespace robscatter {
namespace {

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check(std::span<const double> x, Index h) {
  const auto n = static_cast<Index>(x.size());
  if (h < 2 || h > n) throw DomainError("univariate MCD: need 2 <= h <= n");
  for (const double v : x) {
    if (!std::isfinite(v)) throw DataError("univariate MCD: non-finite value");
  }
}

// Mean and variance (divisor h - 1) of a run of values, two-pass.
std::pair<double, double> window_moments(const double* begin, Index h) {
  CompensatedSum s;
  for (Index i = 0; i < h; ++i) s.add(begin[i]);
  const double mean = s.value() / static_cast<double>(h);
  CompensatedSum ss;
  for (Index i = 0; i < h; ++i) ss.add((begin[i] - mean) * (begin[i] - mean));
  return {mean, ss.value() / static_cast<double>(h - 1)};
}

// Start of the contiguous window with the smallest sum of squared deviations.
// Running sums are shifted by the median to limit cancellation. Windows whose
// running objective is within rounding of the minimum are re-evaluated with
// two-pass moments so that exact ties resolve to the smallest start.
Index best_window(const std::vector<double>& sorted, Index h) {
  const auto n = static_cast<Index>(sorted.size());
  const double shift = sorted[static_cast<std::size_t>((n - 1) / 2)];
  CompensatedSum sum;
  CompensatedSum sq;
  for (Index i = 0; i < h; ++i) {
    const double v = sorted[static_cast<std::size_t>(i)] - shift;
    sum.add(v);
    sq.add(v * v);
  }
  const double hh = static_cast<double>(h);
  std::vector<double> objective(static_cast<std::size_t>(n - h + 1));
  double magnitude = sq.value();
  objective[0] = sq.value() - sum.value() * sum.value() / hh;
  for (Index start = 1; start + h <= n; ++start) {
    const double out = sorted[static_cast<std::size_t>(start - 1)] - shift;
    const double in = sorted[static_cast<std::size_t>(start + h - 1)] - shift;
    sum.add(-out);
    sum.add(in);
    sq.add(-out * out);
    sq.add(in * in);
    magnitude = std::max(magnitude, sq.value());
    objective[static_cast<std::size_t>(start)] = sq.value() - sum.value() * sum.value() / hh;
  }
  const double lowest = *std::min_element(objective.begin(), objective.end());
  const double tol = 1e-10 * magnitude;
  Index best = -1;
  double best_var = std::numeric_limits<double>::infinity();
  for (Index start = 0; start + h <= n; ++start) {
    if (objective[static_cast<std::size_t>(start)] > lowest + tol) continue;
    const double var = window_moments(sorted.data() + start, h).second;
    if (var < best_var) {
      best_var = var;
      best = start;
    }
  }
  return best;
}

UniMcdResult from_window(const double* window, Index h, Index start, Index n) {
  UniMcdResult r;
  const auto [mean, var] = window_moments(window, h);
  r.location = mean;
  r.raw_variance = std::max(0.0, var);
  r.subset_start = start;
  r.h = h;
  r.c0 = consistency_factor_unchecked(static_cast<double>(h) / static_cast<double>(n), 1);
  r.exact_fit = r.raw_variance == 0.0;
  r.scale = std::sqrt(r.raw_variance * r.c0);
  return r;
}

}  // namespace

UniMcdResult uni_mcd(std::span<const double> x, Index h) {
  check(x, h);
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const Index start = best_window(sorted, h);
  return from_window(sorted.data() + start, h, start, static_cast<Index>(sorted.size()));
}

UniMcdResult uni_mcd_bruteforce(std::span<const double> x, Index h) {
  check(x, h);
  const auto n = static_cast<Index>(x.size());
  if (n > 20) throw InstanceTooLarge("uni_mcd_bruteforce: n must not exceed 20");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  // Enumerate subsets of sorted positions as bit masks with exactly h bits.
  std::vector<double> chosen(static_cast<std::size_t>(h));
  double best_var = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  const std::uint32_t limit = 1u << n;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (std::popcount(mask) != h) continue;
    std::size_t t = 0;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) chosen[t++] = sorted[static_cast<std::size_t>(i)];
    }
    const double var = window_moments(chosen.data(), h).second;
    if (var < best_var) {
      best_var = var;
      best_mask = mask;
    }
  }
  std::size_t t = 0;
  Index first = -1;
  for (Index i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) {
      if (first < 0) first = i;
      chosen[t++] = sorted[static_cast<std::size_t>(i)];
    }
  }
  return from_window(chosen.data(), h, first, n);
}

double lts_location(std::span<const double> x, Index h) {
  check(x, h);
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  // For a fixed mu the h smallest squared residuals form a contiguous window,
  // and for a fixed window the optimal mu is its mean.
  const Index start = best_window(sorted, h);
  return window_moments(sorted.data() + start, h).first;
}

LocationScatter uni_mcd_estimate(const DataMatrix& x, Index h) {
  if (x.p() != 1) throw ConfigError("uni_mcd requires exactly one column");
  const Vector col = x.values().col(0);
  const std::span<const double> values(col.data(), static_cast<std::size_t>(col.size()));
  const UniMcdResult r = uni_mcd(values, h);

  LocationScatter est;
  est.kind = EstimatorKind::UniMCD;
  est.h = h;
  est.alpha = static_cast<double>(h) / static_cast<double>(x.n());
  est.c0 = r.c0;
  est.consistency_applied = true;
  est.center = Vector::Constant(1, r.location);
  est.scatter = Matrix::Constant(1, 1, r.scale * r.scale);
  est.exact_fit = r.exact_fit;
  est.log_det = r.exact_fit ? kNegInf : std::log(r.scale * r.scale);
  // Rows at sorted positions [start, start + h), ordered by value then index.
  std::vector<Index> rows(static_cast<std::size_t>(x.n()));
  std::iota(rows.begin(), rows.end(), Index{0});
  std::stable_sort(rows.begin(), rows.end(), [&](Index a, Index b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });
  rows.erase(rows.begin(), rows.begin() + r.subset_start);
  rows.resize(static_cast<std::size_t>(h));
  std::sort(rows.begin(), rows.end());
  est.subset = std::move(rows);
  if (est.exact_fit) est.warnings.push_back("exact fit: at least h identical values");
  return est;
}

}  // namespace robscatter
