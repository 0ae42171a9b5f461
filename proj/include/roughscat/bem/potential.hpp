#pragma once

#include <vector>

#include <Eigen/Core>

#include "roughscat/bem/discretization.hpp"
#include "roughscat/bem/element_geometry.hpp"
#include "roughscat/bem/solve.hpp"

namespace roughscat::bem {

/// Scattered field u_s(x) = -int_S Phi(x, z) psi(z) dsigma_z of a Neumann
/// trace psi of the total wave, by a tensor Gauss rule per element.
///
/// The weighted trace values are precomputed, so repeated evaluations cost
/// one kernel sum over the quadrature points each.  Thread-safe after
/// construction.
class PotentialEvaluator {
 public:
  /// eval_order = 0 selects p + 2 points per direction.
  PotentialEvaluator(const BoundaryDiscretization& disc, const Eigen::VectorXcd& coefficients, double kappa,
                     int eval_order = 0);

  [[nodiscard]] cplx value(const Vec3& x) const;
  [[nodiscard]] Vec3c gradient(const Vec3& x) const;
  void value_and_gradient(const Vec3& x, cplx& value, Vec3c& gradient) const;

  [[nodiscard]] int num_sources() const { return sources_.size(); }

 private:
  double kappa_;
  PointCloud sources_;
  std::vector<double> rho_re_, rho_im_;
};

cplx eval_scattered(const BoundaryDiscretization& disc, const NeumannTrace& trace, double kappa, const Vec3& x,
                    int eval_order = 0);
Vec3c eval_scattered_gradient(const BoundaryDiscretization& disc, const NeumannTrace& trace, double kappa,
                              const Vec3& x, int eval_order = 0);

}  // namespace roughscat::bem
