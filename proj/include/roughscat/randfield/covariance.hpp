#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "roughscat/common.hpp"
#include "roughscat/randfield/matern.hpp"

namespace roughscat::randfield {

/// amplitude * k(scale * r).
struct KernelTerm {
  double amplitude = 1.0;
  double scale = 1.0;
  MaternKernel kernel;

  [[nodiscard]] double operator()(double r) const;
};

/// Matrix-valued covariance of a 3D deformation field; entry (a, b) depends
/// on the distance only.  Terms are indexed by 3 * a + b and must be
/// symmetric in (a, b).
struct CovarianceModel {
  std::array<KernelTerm, 9> terms;

  /// Diagonal 1 * k_{3/2}(20 r), off-diagonal 1e-4 * k_inf(4 r).
  static CovarianceModel standard();

  [[nodiscard]] const KernelTerm& term(int a, int b) const { return terms[3 * a + b]; }
  void validate() const;
};

Eigen::Matrix3d covariance_entry(const CovarianceModel& model, const Vec3& x, const Vec3& xp);

/// Symmetric matrix accessed one column at a time.
class SymmetricOracle {
 public:
  virtual ~SymmetricOracle() = default;
  [[nodiscard]] virtual int dim() const = 0;
  [[nodiscard]] virtual double diagonal(int i) const = 0;
  virtual void column(int j, std::span<double> out) const = 0;
};

/// The 3n x 3n covariance over landmark points, ordered component-major:
/// row a * n + i is component a at point i.
class LandmarkCovariance final : public SymmetricOracle {
 public:
  LandmarkCovariance(CovarianceModel model, std::vector<Vec3> points);

  [[nodiscard]] int dim() const override { return 3 * static_cast<int>(points_.size()); }
  [[nodiscard]] double diagonal(int i) const override;
  void column(int j, std::span<double> out) const override;
  [[nodiscard]] double operator()(int i, int j) const;
  [[nodiscard]] double trace() const;

 private:
  CovarianceModel model_;
  std::vector<Vec3> points_;
};

}  // namespace roughscat::randfield
