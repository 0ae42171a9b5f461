#include "roughscat/randfield/covariance.hpp"

#include <cmath>

namespace roughscat::randfield {

double KernelTerm::operator()(double r) const {
  if (amplitude == 0.0) return 0.0;
  return amplitude * matern_eval(kernel, scale * r);
}

CovarianceModel CovarianceModel::standard() {
  CovarianceModel m;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      m.terms[3 * a + b] = a == b ? KernelTerm{1.0, 20.0, {1.5, 1.0}} : KernelTerm{1e-4, 4.0, {kGaussianSmoothness, 1.0}};
    }
  }
  return m;
}

void CovarianceModel::validate() const {
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const KernelTerm& t = term(a, b);
      const KernelTerm& u = term(b, a);
      if (!(t.scale > 0.0) || !(t.kernel.nu > 0.0) || !(t.kernel.length > 0.0) || !std::isfinite(t.amplitude)) {
        throw InvalidArgument("covariance model: invalid kernel term");
      }
      if (t.amplitude != u.amplitude || t.scale != u.scale || t.kernel.nu != u.kernel.nu ||
          t.kernel.length != u.kernel.length) {
        throw InvalidArgument("covariance model: terms (a,b) and (b,a) must agree");
      }
    }
    if (!(term(a, a).amplitude > 0.0)) throw InvalidArgument("covariance model: diagonal amplitudes must be positive");
  }
}

Eigen::Matrix3d covariance_entry(const CovarianceModel& model, const Vec3& x, const Vec3& xp) {
  const double r = (x - xp).norm();
  Eigen::Matrix3d c;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) c(a, b) = model.term(a, b)(r);
  }
  return c;
}

LandmarkCovariance::LandmarkCovariance(CovarianceModel model, std::vector<Vec3> points)
    : model_(std::move(model)), points_(std::move(points)) {
  model_.validate();
}

double LandmarkCovariance::diagonal(int i) const {
  const int a = i / static_cast<int>(points_.size());
  return model_.term(a, a)(0.0);
}

double LandmarkCovariance::operator()(int i, int j) const {
  const int n = static_cast<int>(points_.size());
  return model_.term(i / n, j / n)((points_[i % n] - points_[j % n]).norm());
}

void LandmarkCovariance::column(int j, std::span<double> out) const {
  const int n = static_cast<int>(points_.size());
  const int b = j / n;
  const Vec3& xj = points_[j % n];
  for (int i = 0; i < n; ++i) {
    const double r = (points_[i] - xj).norm();
    for (int a = 0; a < 3; ++a) out[a * n + i] = model_.term(a, b)(r);
  }
}

double LandmarkCovariance::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim(); ++i) t += diagonal(i);
  return t;
}

}  // namespace roughscat::randfield
