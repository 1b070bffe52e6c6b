#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "robscatter/chi_square.hpp"
#include "robscatter/core.hpp"
#include "robscatter/errors.hpp"
#include "test_util.hpp"

using namespace robscatter;

TEST_CASE("DataMatrix validation") {
  CHECK_THROWS_AS(DataMatrix(Matrix(0, 2)), DegenerateData);
  CHECK_THROWS_AS(DataMatrix(Matrix(3, 0)), DegenerateData);
  Matrix bad = Matrix::Zero(3, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(DataMatrix{bad}, DataError);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(DataMatrix{bad}, DataError);
  CHECK(DataMatrix(Matrix::Ones(1, 1)).n() == 1);
}

TEST_CASE("statistical distance") {
  const Vector mu = Vector::Zero(2);
  CHECK(statistical_distance(mu, mu, Matrix::Identity(2, 2)) == 0.0);
  CHECK(statistical_distance(Vector{{3.0, 4.0}}, mu, Matrix::Identity(2, 2)) ==
        doctest::Approx(5.0));
  Matrix d = Vector{{4.0, 1.0}}.asDiagonal();
  CHECK(statistical_distance(Vector{{2.0, 1.0}}, mu, d) == doctest::Approx(std::sqrt(2.0)));
  Matrix singular = Matrix::Ones(2, 2);
  CHECK_THROWS_AS(statistical_distance(mu, mu, singular), SingularMatrix);
  Matrix indefinite{{1.0, 0.0}, {0.0, -1.0}};
  CHECK_THROWS_AS(statistical_distance(mu, mu, indefinite), SingularMatrix);
}

TEST_CASE("statistical distance is affine invariant") {
  CounterRng rng(3, 0);
  for (int t = 0; t < 200; ++t) {
    const Index p = 1 + static_cast<Index>(rng.uniform(5));
    const Matrix a = testutil::random_nonsingular(p, rng);
    const Matrix l = standard_normal_matrix(p, p, rng);
    const Matrix sigma = l * l.transpose() + 0.5 * Matrix::Identity(p, p);
    const Vector x = standard_normal_matrix(p, 1, rng);
    const Vector mu = standard_normal_matrix(p, 1, rng);
    const Vector b = standard_normal_matrix(p, 1, rng);
    const double d0 = statistical_distance(x, mu, sigma);
    const double d1 = statistical_distance(a * x + b, a * mu + b, a * sigma * a.transpose());
    CHECK(std::abs(d0 - d1) <= 1e-8 * std::max(1.0, d0));
  }
}

TEST_CASE("mahalanobis distances") {
  DataMatrix sym(Matrix{{-1, 0}, {1, 0}, {0, -1}, {0, 1}});
  const Vector md = mahalanobis_all(sym);
  for (Index i = 1; i < 4; ++i) CHECK(md(i) == doctest::Approx(md(0)));

  DataMatrix uni(Matrix{{0.0}, {1.0}, {2.0}});
  const Vector mu = mahalanobis_all(uni);
  CHECK(mu(0) == doctest::Approx(1.0));
  CHECK(mu(1) == doctest::Approx(0.0));
  CHECK(mu(2) == doctest::Approx(1.0));

  const Matrix g = testutil::gaussian(10, 2, 17);
  const Vector m = mahalanobis_all(DataMatrix(g));
  const Vector mean = g.colwise().mean();
  const Matrix c = g.rowwise() - mean.transpose();
  const Matrix inv = (c.transpose() * c / 9.0).inverse();
  for (Index i = 0; i < 10; ++i) {
    const Vector dx = g.row(i).transpose() - mean;
    CHECK(m(i) == doctest::Approx(std::sqrt(dx.dot(inv * dx))).epsilon(1e-10));
  }

  CHECK_THROWS_AS(mahalanobis_all(DataMatrix(Matrix{{0, 0}, {1, 1}, {2, 2}})), SingularMatrix);
}

TEST_CASE("subset statistics") {
  DataMatrix x(Matrix{{0, 0}, {2, 0}, {0, 2}, {2, 2}, {7, 7}});
  const HSubset s = subset_stats(x, {3, 1, 0, 2});
  CHECK(s.indices == std::vector<Index>{0, 1, 2, 3});
  CHECK(s.mean(0) == doctest::Approx(1.0));
  CHECK(s.mean(1) == doctest::Approx(1.0));
  CHECK((s.cov - (4.0 / 3.0) * Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK(s.log_det == doctest::Approx(2.0 * std::log(4.0 / 3.0)));

  DataMatrix dup(Matrix{{1, 2}, {1, 2}, {3, 1}});
  CHECK(subset_stats(dup, {0, 1}).singular());

  DataMatrix one(Matrix{{1.0}, {2.0}, {3.0}});
  const HSubset u = subset_stats(one, {0, 1, 2});
  CHECK(u.mean(0) == doctest::Approx(2.0));
  CHECK(u.cov(0, 0) == doctest::Approx(1.0));

  CHECK_THROWS(subset_stats(x, {0}));
  CHECK_THROWS(subset_stats(x, {0, 0, 1}));
  CHECK_THROWS(subset_stats(x, {0, 9}));
}

TEST_CASE("subset log-determinant equals the eigenvalue product") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const DataMatrix x(testutil::gaussian(5, 3, s, 1));
    const HSubset h = subset_stats(x, {0, 1, 2, 3, 4});
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.cov);
    const double ld = es.eigenvalues().array().log().sum();
    CHECK(h.log_det == doctest::Approx(ld).epsilon(1e-8));
  }
}

TEST_CASE("consistency factor") {
  CHECK(consistency_factor_raw(1.0, 3) == 1.0);
  const double closed = 0.5 / (1.0 - std::exp(-std::log(2.0)) * (1.0 + std::log(2.0)));
  CHECK(std::abs(consistency_factor_raw(0.5, 2) - closed) < 1e-6);
  CHECK(consistency_factor_unchecked(0.5, 2) == doctest::Approx(closed).epsilon(1e-10));
  CHECK(closed == doctest::Approx(3.2588).epsilon(1e-4));
  CHECK_THROWS_AS(consistency_factor_raw(0.49, 2), DomainError);
  CHECK_THROWS_AS(consistency_factor_raw(1.01, 2), DomainError);
  CHECK_THROWS_AS(consistency_factor_unchecked(0.0, 2), DomainError);

  // p = 1, alpha = 0.75: F_{chi2_3}(q) by quadrature of the chi2_3 density.
  const double q = chi2_quantile(0.75, 1);
  auto dens = [](double t) { return std::sqrt(t) * std::exp(-t / 2) / std::sqrt(2.0 * M_PI); };
  const double f3 = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(dens, 0.0, q);
  CHECK(consistency_factor_raw(0.75, 1) == doctest::Approx(0.75 / f3).epsilon(1e-9));

  for (int p = 1; p <= 10; ++p) {
    double prev = 1.0;
    for (int k = 20; k >= 10; --k) {
      const double c = consistency_factor_raw(k / 20.0, p);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("h from alpha") {
  CHECK(default_h(59, 2) == 31);
  CHECK(h_from_alpha(59, 2, 0.5) == 31);
  CHECK(h_from_alpha(59, 2, 0.75) == 45);
  CHECK(h_from_alpha(59, 2, 1.0) == 59);
  CHECK(h_from_alpha(1000, 2, 0.5) == 501);
  CHECK_THROWS(h_from_alpha(59, 2, 0.4));
}

TEST_CASE("classical estimate") {
  const Matrix g = testutil::gaussian(30, 3, 4);
  const LocationScatter c = classical_estimate(DataMatrix(g));
  CHECK(c.kind == EstimatorKind::Classical);
  CHECK(c.h == 30);
  CHECK(c.log_det == doctest::Approx(std::log(c.scatter.determinant())).epsilon(1e-10));
}
