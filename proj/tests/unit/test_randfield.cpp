#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "roughscat/geometry/interpolated_surface.hpp"
#include "roughscat/randfield/kl.hpp"
#include "roughscat/randfield/rng.hpp"

using namespace roughscat;
using namespace roughscat::randfield;

namespace {

Eigen::MatrixXd random_spd(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n * n; ++i) a.data()[i] = g(rng);
  return a * a.transpose() / n + 1e-3 * Eigen::MatrixXd::Identity(n, n);
}

PivotedCholeskyResult factor_dense(const Eigen::MatrixXd& c, double tol) {
  return pivoted_cholesky([&](int i, int j) { return c(i, j); }, static_cast<int>(c.rows()), tol);
}

}  // namespace

TEST_CASE("matern closed forms") {
  CHECK(matern_eval({0.5, 1.0}, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(matern_eval({0.5, 1.0}, 1.0) == doctest::Approx(0.3678794).epsilon(1e-7));
  CHECK(matern_eval({1.5, 1.0}, 1.0) == doctest::Approx((1 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0))).epsilon(1e-15));
  CHECK(matern_eval({1.5, 1.0}, 1.0) == doctest::Approx(0.4833577).epsilon(1e-7));
  CHECK(matern_eval({kGaussianSmoothness, 2.0}, 1.0) == doctest::Approx(std::exp(-0.125)).epsilon(1e-15));
  for (double nu : {0.3, 0.5, 1.5, 2.5, 3.7, kGaussianSmoothness}) CHECK(matern_eval({nu, 0.7}, 0.0) == 1.0);
  CHECK_THROWS_AS(matern_eval({1.5, 1.0}, -0.1), InvalidArgument);
  CHECK_THROWS_AS(matern_eval({0.0, 1.0}, 0.1), InvalidArgument);
  CHECK_THROWS_AS(matern_eval({1.5, 0.0}, 0.1), InvalidArgument);
}

TEST_CASE("general smoothness agrees with neighbouring closed forms") {
  for (double half : {0.5, 1.5, 2.5}) {
    for (double r : {0.05, 0.3, 1.0, 2.5, 6.0}) {
      const double closed = matern_eval({half, 1.0}, r);
      const double bessel = matern_eval({half * (1 + 1e-12), 1.0}, r);
      CHECK(bessel == doctest::Approx(closed).epsilon(1e-9));
    }
  }
  // Large nu tends to the Gaussian.
  for (double r : {0.2, 0.8, 1.5}) {
    CHECK(matern_eval({200.0, 1.0}, r) == doctest::Approx(matern_eval({kGaussianSmoothness, 1.0}, r)).epsilon(2e-2));
  }
}

TEST_CASE("matern is monotone and bounded") {
  for (double nu : {0.5, 0.9, 1.5, 2.5, 4.2, kGaussianSmoothness}) {
    double prev = 1.0;
    for (int i = 1; i <= 400; ++i) {
      const double k = matern_eval({nu, 1.0}, i * 0.02);
      CHECK(k > 0.0);
      CHECK(k <= prev);
      prev = k;
    }
  }
}

TEST_CASE("default covariance entries") {
  const CovarianceModel model = CovarianceModel::standard();
  const Vec3 x(0.3, -0.2, 0.1);
  const Eigen::Matrix3d c0 = covariance_entry(model, x, x);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) CHECK(c0(a, b) == (a == b ? 1.0 : 1e-4));
  }
  const Vec3 xp = x + Vec3(0.03, 0.04, 0.0);
  const Eigen::Matrix3d c = covariance_entry(model, x, xp);
  for (int a = 0; a < 3; ++a) CHECK(c(a, a) == doctest::Approx((1 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0))).epsilon(1e-14));
  CHECK(c(0, 1) == doctest::Approx(1e-4 * std::exp(-0.5 * 0.2 * 0.2)).epsilon(1e-14));
  CHECK(covariance_entry(model, xp, x) == c);
  CHECK(covariance_entry(model, xp, x) == c.transpose());
}

TEST_CASE("landmark covariance layout is component-major") {
  const CovarianceModel model = CovarianceModel::standard();
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(0.05, 0, 0), Vec3(0, 0.1, 0)};
  const LandmarkCovariance cov(model, pts);
  CHECK(cov.dim() == 9);
  for (int i = 0; i < 9; ++i) {
    std::vector<double> col(9);
    cov.column(i, col);
    for (int j = 0; j < 9; ++j) {
      const Eigen::Matrix3d e = covariance_entry(model, pts[j % 3], pts[i % 3]);
      CHECK(col[j] == e(j / 3, i / 3));
      CHECK(cov(j, i) == col[j]);
      CHECK(cov(i, j) == col[j]);
    }
  }
  CHECK(cov.trace() == 9.0);
}

TEST_CASE("pivoted cholesky: identity") {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(3, 3);
  const PivotedCholeskyResult r = factor_dense(c, 1e-12);
  CHECK(r.rank() == 3);
  CHECK(r.final_trace() == 0.0);
  CHECK(r.converged);
  const Eigen::MatrixXd a = r.factor.cwiseAbs();
  CHECK((a * a.transpose() - c).norm() == 0.0);
  for (int k = 0; k < 3; ++k) CHECK(a.col(k).sum() == 1.0);
}

TEST_CASE("pivoted cholesky: rank one") {
  const Eigen::Vector3d v(1, 2, 2);
  const Eigen::MatrixXd c = v * v.transpose();
  const PivotedCholeskyResult r = factor_dense(c, 1e-12);
  CHECK(r.rank() == 1);
  CHECK((r.pivots[0] == 1 || r.pivots[0] == 2));
  CHECK(r.factor(r.pivots[0], 0) == 2.0);
  CHECK((r.factor * r.factor.transpose() - c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pivoted cholesky against a dense eigendecomposition") {
  const Eigen::MatrixXd c = random_spd(30, 11);
  const PivotedCholeskyResult r = factor_dense(c, 1e-8);
  CHECK(r.converged);
  const Eigen::MatrixXd res = c - r.factor * r.factor.transpose();
  // Oracle: the residual is PSD (eigenvalues >= -eps) and its eigenvalues sum to its trace.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
  CHECK(es.eigenvalues().sum() <= 1e-8 * c.trace());
  CHECK(res.trace() == doctest::Approx(r.final_trace()).epsilon(1e-6).scale(c.trace()));
  for (std::size_t k = 1; k < r.residual_trace.size(); ++k) CHECK(r.residual_trace[k] < r.residual_trace[k - 1]);
  for (int p : r.pivots) CHECK(res.row(p).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("pivoted cholesky errors and early stop") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(factor_dense(bad, 1e-6), NotPositiveSemidefinite);
  CHECK_THROWS_AS(factor_dense(-Eigen::MatrixXd::Identity(2, 2), 1e-6), NotPositiveSemidefinite);
  CHECK_THROWS_AS(factor_dense(Eigen::MatrixXd::Identity(2, 2), 0.0), InvalidArgument);

  // The pivot floor ends the factorization before the tolerance is met.
  Eigen::MatrixXd tiny = Eigen::MatrixXd::Zero(3, 3);
  tiny.diagonal() << 1.0, 1e-16, 1e-16;
  const PivotedCholeskyResult r = factor_dense(tiny, 1e-20);
  CHECK(r.rank() == 1);
  CHECK_FALSE(r.converged);
}

TEST_CASE("pivoted cholesky does not assemble the matrix") {
  const Eigen::MatrixXd c = random_spd(60, 5);
  int calls = 0;
  const PivotedCholeskyResult r = pivoted_cholesky(
      [&](int i, int j) {
        ++calls;
        return c(i, j);
      },
      60, 0.5);
  CHECK(r.rank() < 60);
  CHECK(calls == 60 + 60 * r.rank());
}

TEST_CASE("KL from cholesky") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 1;
  const KLBasis kd = kl_from_cholesky(factor_dense(d, 1e-14));
  CHECK(kd.rank() == 2);
  CHECK(kd.eigenvalues[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(kd.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kd.modes.col(0).norm() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(kd.modes.col(1).norm() == doctest::Approx(1.0).epsilon(1e-15));

  const Eigen::Vector3d v(1, 2, 2);
  const KLBasis k1 = kl_from_cholesky(factor_dense(v * v.transpose(), 1e-12));
  CHECK(k1.rank() == 1);
  CHECK(k1.eigenvalues[0] == doctest::Approx(9.0).epsilon(1e-14));
  CHECK((k1.modes.col(0) - v).norm() < 1e-13);
}

TEST_CASE("KL eigenpair transfer, orthogonality and trace") {
  const Eigen::MatrixXd c = random_spd(80, 3);
  const PivotedCholeskyResult r = factor_dense(c, 1e-6);
  const KLBasis kl = kl_from_cholesky(r);
  const Eigen::MatrixXd llt = r.factor * r.factor.transpose();
  CHECK(kl.eigenvalues.sum() == doctest::Approx(llt.trace()).epsilon(1e-10));
  const double l1 = kl.eigenvalues[0];
  for (int k = 0; k < kl.rank(); ++k) {
    if (k > 0) CHECK(kl.eigenvalues[k] <= kl.eigenvalues[k - 1]);
    const Eigen::VectorXd u = kl.modes.col(k);
    CHECK((llt * u - kl.eigenvalues[k] * u).norm() <= 1e-8 * l1 * u.norm());
    CHECK(u.norm() == doctest::Approx(std::sqrt(kl.eigenvalues[k])).epsilon(1e-10));
  }
  const Eigen::MatrixXd g = kl.modes.transpose() * kl.modes;
  for (int a = 0; a < kl.rank(); ++a) {
    for (int b = 0; b < a; ++b) CHECK(std::abs(g(a, b)) <= 1e-8 * std::sqrt(g(a, a) * g(b, b)));
  }
}

TEST_CASE("deformation samples") {
  const geometry::LandmarkSet lm = geometry::build_landmarks(geometry::builtin_surface("torus"), 4);
  const LandmarkCovariance cov(CovarianceModel::standard(), lm.points);
  const PivotedCholeskyResult chol = pivoted_cholesky(cov, 1e-3);
  CHECK(chol.converged);
  const KLBasis kl = kl_from_cholesky(chol);
  const int m = kl.rank();

  const DeformationSample zero = kl_sample(kl, lm, 0.07, Eigen::VectorXd::Zero(m));
  CHECK(zero.displaced == lm.points);
  const Eigen::VectorXd y = draw_parameters(StreamId{1, 2, 3, 4}, m);
  const DeformationSample frozen = kl_sample(kl, lm, 0.0, y);
  CHECK(frozen.displaced == lm.points);

  const double alpha = 0.07;
  const DeformationSample s = kl_sample(kl, lm, alpha, y);
  double bound = 0.0;
  for (int k = 0; k < m; ++k) bound += kl.modes.col(k).cwiseAbs().maxCoeff();
  double disp = 0.0;
  for (int i = 0; i < lm.count(); ++i) disp = std::max(disp, (s.displaced[i] - lm.points[i]).cwiseAbs().maxCoeff());
  CHECK(disp > 0.0);
  CHECK(disp <= alpha * bound);

  // Linearity in y.
  const Eigen::VectorXd y1 = 0.5 * draw_parameters(StreamId{1, 2, 3, 5}, m);
  const Eigen::VectorXd y2 = 0.5 * draw_parameters(StreamId{1, 2, 3, 6}, m);
  const DeformationSample s1 = kl_sample(kl, lm, alpha, y1);
  const DeformationSample s2 = kl_sample(kl, lm, alpha, y2);
  const DeformationSample s12 = kl_sample(kl, lm, alpha, y1 + y2);
  for (int i = 0; i < lm.count(); ++i) {
    const Vec3 lhs = s12.displaced[i] - lm.points[i];
    const Vec3 rhs = (s1.displaced[i] - lm.points[i]) + (s2.displaced[i] - lm.points[i]);
    CHECK((lhs - rhs).norm() < 1e-12);
  }

  // Shared landmarks move together, so the deformed surface is continuous.
  CHECK_NOTHROW(geometry::surface_from_global(lm, s.displaced));
  const geometry::InterpolatedSurface undeformed = geometry::surface_from_global(lm, lm.points);
  const geometry::InterpolatedSurface same = geometry::surface_from_global(lm, zero.displaced);
  CHECK(same.eval(3, 0.31, 0.72) == undeformed.eval(3, 0.31, 0.72));

  CHECK_THROWS_AS(kl_sample(kl, lm, alpha, Eigen::VectorXd::Zero(m + 1)), InvalidArgument);
  Eigen::VectorXd out_of_range = Eigen::VectorXd::Zero(m);
  out_of_range[0] = 1.5;
  CHECK_THROWS_AS(kl_sample(kl, lm, alpha, out_of_range), InvalidArgument);
}

TEST_CASE("default covariance on torus landmarks is PSD at tolerance 1e-3") {
  const geometry::LandmarkSet lm = geometry::build_landmarks(geometry::builtin_surface("torus"), 6);
  const LandmarkCovariance cov(CovarianceModel::standard(), lm.points);
  PivotedCholeskyResult r;
  CHECK_NOTHROW(r = pivoted_cholesky(cov, 1e-3));
  CHECK(r.converged);
  CHECK(r.final_trace() <= 1e-3 * cov.trace());
}

TEST_CASE("parameter streams") {
  const StreamId id{42, 1, 2, 3};
  CHECK(draw_parameters(id, 17) == draw_parameters(id, 17));
  CHECK(draw_parameters(id, 17) != draw_parameters(StreamId{42, 1, 2, 4}, 17));
  CHECK(draw_parameters(id, 17) != draw_parameters(StreamId{42, 2, 2, 3}, 17));
  CHECK(draw_parameters(id, 17) != draw_parameters(StreamId{43, 1, 2, 3}, 17));

  const int m = 4, draws = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m), sq = Eigen::VectorXd::Zero(m);
  for (int n = 0; n < draws; ++n) {
    const Eigen::VectorXd y = draw_parameters(StreamId{7, 0, 0, static_cast<std::uint64_t>(n)}, m);
    CHECK(y.cwiseAbs().maxCoeff() <= 1.0);
    sum += y;
    sq += y.cwiseAbs2();
  }
  for (int k = 0; k < m; ++k) {
    const double mean = sum[k] / draws;
    const double var = sq[k] / draws - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0 / 3.0).epsilon(0.05));
  }
}

TEST_CASE("singular value decay") {
  Eigen::VectorXd p(400), e(60);
  for (int k = 1; k <= 400; ++k) p[k - 1] = std::pow(k, -1.25);
  for (int k = 1; k <= 60; ++k) e[k - 1] = std::exp(-k);
  CHECK(singular_value_decay(p) == doctest::Approx(-1.25).epsilon(1e-6));
  CHECK(singular_value_decay(e) < -3.0);
  CHECK_THROWS_AS(singular_value_decay(Eigen::VectorXd::Ones(19)), InvalidArgument);
}

TEST_CASE("KL cache round trip") {
  const Eigen::MatrixXd c = random_spd(12, 9);
  const KLBasis kl = kl_from_cholesky(factor_dense(c, 1e-10));
  const std::string path = "test_randfield_kl.bin";
  save_kl(kl, path);
  const KLBasis back = load_kl(path);
  CHECK(back.eigenvalues == kl.eigenvalues);
  CHECK(back.modes == kl.modes);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  std::fputs("nope", f);
  std::fclose(f);
  CHECK_THROWS_AS(load_kl(path), Error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_kl("/nonexistent/kl.bin"), Error);
}
