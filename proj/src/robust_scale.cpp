#include "robscatter/robust_scale.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "robscatter/errors.hpp"

namespace robscatter {

double median(std::span<const double> x) {
  if (x.empty()) throw DomainError("median of an empty sample");
  std::vector<double> v(x.begin(), x.end());
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return lower + 0.5 * (upper - lower);
}

namespace {

// Number of pairs i < j of the sorted sample with x[j] - x[i] <= t.
std::uint64_t count_within(const std::vector<double>& sorted, double t) {
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (std::size_t j = 1; j < sorted.size(); ++j) {
    while (sorted[j] - sorted[i] > t) ++i;
    count += j - i;
  }
  return count;
}

}  // namespace

double qn_scale(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("qn_scale: need at least two values");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  const std::uint64_t half = n / 2 + 1;
  const std::uint64_t k = half * (half - 1) / 2;

  if (count_within(sorted, 0.0) >= k) {
    throw ZeroScale("qn_scale: more than half of the values are tied");
  }
  // Smallest representable t with count_within(t) >= k is the k-th smallest
  // pairwise difference. Nonnegative doubles order like their bit patterns.
  std::uint64_t lo = 0;  // count(lo) < k
  std::uint64_t hi = std::bit_cast<std::uint64_t>(sorted.back() - sorted.front());
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (count_within(sorted, std::bit_cast<double>(mid)) >= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return kQnConsistency * std::bit_cast<double>(hi);
}

}  // namespace robscatter
