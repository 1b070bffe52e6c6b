#pragma once

namespace robscatter {

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// Chi-square distribution with a positive integer number of degrees of freedom.
class ChiSquare {
 public:
  explicit ChiSquare(int df);

  int df() const noexcept { return df_; }

  // P(X <= x); returns 0 for x <= 0 and 1 for x = +inf.
  double cdf(double x) const;

  // Inverse of cdf, absolute tolerance 1e-10. Throws DomainError unless
  // 0 < prob < 1.
  double quantile(double prob) const;

 private:
  int df_;
};

double chi2_cdf(double x, int df);
double chi2_quantile(double prob, int df);

}  // namespace robscatter
