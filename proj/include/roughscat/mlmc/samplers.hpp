#pragma once

#include <memory>

#include "roughscat/bem/assembly.hpp"
#include "roughscat/bem/discretization.hpp"
#include "roughscat/bem/solve.hpp"
#include "roughscat/geometry/landmarks.hpp"
#include "roughscat/interface/interface.hpp"
#include "roughscat/mlmc/estimator.hpp"
#include "roughscat/randfield/kl.hpp"

namespace roughscat::mlmc {

/// rho^(p)(omega) = a + g(omega) b + 2^-p h(omega) c with independent g, h
/// uniform on [-sqrt 3, sqrt 3] (mean 0, variance 1).  Evaluating degree p
/// costs 2^p operations.
class AffineSampler final : public Sampler {
 public:
  AffineSampler(Eigen::VectorXcd a, Eigen::VectorXcd b, Eigen::VectorXcd c);

  [[nodiscard]] int dim() const override { return static_cast<int>(a_.size()); }
  [[nodiscard]] std::vector<Eigen::VectorXcd> evaluate(const randfield::StreamId& id, std::span<const int> degrees,
                                                       SampleCost& cost) const override;

  [[nodiscard]] const Eigen::VectorXcd& exact_mean() const { return a_; }
  /// E[rho^(p) conj(rho^(p))^T] = a a^H + b b^H + 4^-p c c^H.
  [[nodiscard]] Eigen::MatrixXcd exact_second_moment(int p) const;
  /// Scalar variance of the level-p quantity as defined by pilot_estimate.
  [[nodiscard]] double level_variance(int p) const;

 private:
  Eigen::VectorXcd a_, b_, c_;
};

struct BemSamplerOptions {
  double alpha = 0.07;
  bem::WaveSetup wave = bem::make_wave(5.0, Vec3::UnitX());
  bem::AssemblyOptions assembly;
  bem::SolveOptions solve;
  int eval_order = 0;
  /// Workers used inside a single evaluation (assembly rows and interface
  /// points).  Results do not depend on it.
  int workers = 1;
};

/// One BEM solve of a realization.
struct BemSolution {
  std::unique_ptr<bem::BoundaryDiscretization> disc;
  bem::NeumannTrace trace;
  double operations = 0.0;
};

/// Cauchy data of random realizations: parameters y ~ U(-1, 1)^m from the
/// stream, landmarks displaced by alpha * (KL modes) y, the surface
/// re-interpolated and the CFIE solved at each degree.
///
/// The operation count of one solve is the number of kernel evaluations in
/// assembly and potential evaluation plus n^3 / 1000 for the dense LU of n
/// unknowns; one kernel evaluation costs about as much as 1000 LU
/// multiply-adds would.
class BemSampler final : public Sampler {
 public:
  BemSampler(std::shared_ptr<const randfield::KLBasis> basis, std::shared_ptr<const geometry::LandmarkSet> landmarks,
             std::shared_ptr<const interface::ArtificialInterface> iface, BemSamplerOptions options);

  [[nodiscard]] int dim() const override { return 2 * iface_->size(); }
  [[nodiscard]] std::vector<Eigen::VectorXcd> evaluate(const randfield::StreamId& id, std::span<const int> degrees,
                                                       SampleCost& cost) const override;

  [[nodiscard]] std::shared_ptr<const geometry::InterpolatedSurface> realization(const randfield::StreamId& id) const;
  [[nodiscard]] std::shared_ptr<const geometry::InterpolatedSurface> realization(const Eigen::VectorXd& y) const;
  [[nodiscard]] BemSolution solve(std::shared_ptr<const geometry::InterpolatedSurface> surface, int degree) const;
  [[nodiscard]] interface::CauchyData cauchy(const BemSolution& solution, double* operations = nullptr) const;

  [[nodiscard]] const BemSamplerOptions& options() const { return options_; }
  [[nodiscard]] const interface::ArtificialInterface& artificial_interface() const { return *iface_; }
  [[nodiscard]] int parameters() const { return basis_->rank(); }

 private:
  std::shared_ptr<const randfield::KLBasis> basis_;
  std::shared_ptr<const geometry::LandmarkSet> landmarks_;
  std::shared_ptr<const interface::ArtificialInterface> iface_;
  BemSamplerOptions options_;
};

}  // namespace roughscat::mlmc
