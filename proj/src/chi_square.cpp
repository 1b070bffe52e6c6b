#include "robscatter/chi_square.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "robscatter/errors.hpp"

namespace robscatter {
namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 10000;

// Series expansion, converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("regularized_gamma_p: a must be positive");
  if (std::isnan(x)) throw DomainError("regularized_gamma_p: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

ChiSquare::ChiSquare(int df) : df_(df) {
  if (df < 1) throw DomainError("chi-square: df must be a positive integer");
}

double ChiSquare::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("chi-square cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * df_, 0.5 * x);
}

double ChiSquare::quantile(double prob) const {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw DomainError("chi-square quantile: prob must lie in (0, 1), got " +
                      std::to_string(prob));
  }
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(df_));
  while (cdf(hi) < prob) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  // Bisection; terminates once the bracket cannot be split any further.
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    if (cdf(mid) < prob) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double chi2_cdf(double x, int df) { return ChiSquare(df).cdf(x); }

double chi2_quantile(double prob, int df) { return ChiSquare(df).quantile(prob); }

}  // namespace robscatter
