#pragma once

#include <vector>

#include <Eigen/Core>

#include "roughscat/bem/discretization.hpp"
#include "roughscat/bem/element_geometry.hpp"
#include "roughscat/bem/solve.hpp"
#include "roughscat/geometry/multipatch.hpp"

namespace roughscat::interface {

/// A realization reaches into the safety margin of the interface.
class EnclosureError : public Error {
 public:
  using Error::Error;
};

/// The cuboid [-h, h]^3 as 24 patches, each carrying a g x g tensor
/// Gauss-Legendre grid.  The grid serves as interpolation nodes and as the
/// quadrature rule of the representation formula.
///
/// Points are ordered by (patch, j, i) with i running along s and j along t.
class ArtificialInterface {
 public:
  explicit ArtificialInterface(double half_width = 2.0, int grid = 9, double margin = 0.05);

  [[nodiscard]] double half_width() const { return half_width_; }
  [[nodiscard]] int grid() const { return grid_; }
  [[nodiscard]] double margin() const { return margin_; }
  [[nodiscard]] int num_patches() const { return surface_.size(); }
  [[nodiscard]] int size() const { return points_.size(); }
  [[nodiscard]] const geometry::MultiPatchSurface& surface() const { return surface_; }

  [[nodiscard]] Vec3 point(int k) const { return points_.point(k); }
  [[nodiscard]] Vec3 normal(int k) const { return {points_.nx[k], points_.ny[k], points_.nz[k]}; }
  [[nodiscard]] double weight(int k) const { return points_.w[k]; }
  [[nodiscard]] const bem::PointCloud& points() const { return points_; }
  [[nodiscard]] int patch_of(int k) const { return k / (grid_ * grid_); }
  [[nodiscard]] int i_of(int k) const { return k % grid_; }
  [[nodiscard]] int j_of(int k) const { return (k / grid_) % grid_; }

  /// Throws EnclosureError unless sup_norm < half_width - margin.
  void check_enclosure(double sup_norm) const;
  /// True when |x|_inf > half_width.
  [[nodiscard]] bool outside(const Vec3& x) const;

  bool operator==(const ArtificialInterface& other) const {
    return half_width_ == other.half_width_ && grid_ == other.grid_;
  }

 private:
  double half_width_;
  int grid_;
  double margin_;
  geometry::MultiPatchSurface surface_;
  bem::PointCloud points_;
};

/// Traces of the scattered field at the interface points.
struct CauchyData {
  Eigen::VectorXcd value;               // u_s
  Eigen::VectorXcd normal_derivative;   // du_s/dn with the outward interface normal

  [[nodiscard]] int size() const { return static_cast<int>(value.size()); }
  /// [u_s; du_s/dn], the layout used by the moment blocks.
  [[nodiscard]] Eigen::VectorXcd stacked() const;
};

/// Evaluates the potential of `trace` and its normal derivative at every
/// interface point.  Throws EnclosureError when the realization's nodal
/// values leave the margin.
CauchyData cauchy_from_trace(const bem::BoundaryDiscretization& disc, const bem::NeumannTrace& trace, double kappa,
                             const ArtificialInterface& iface, int workers = 1, int eval_order = 0);

/// Coefficients a(x) with u_s(x) = sum_k a_k(x) c_k for the stacked Cauchy
/// data c: a = [w dPhi/dn_z, -w Phi].  Throws InvalidArgument unless x is
/// strictly outside the cuboid.
Eigen::VectorXcd representation_row(const ArtificialInterface& iface, double kappa, const Vec3& x);

/// One row per point.
Eigen::MatrixXcd representation_matrix(const ArtificialInterface& iface, double kappa, const std::vector<Vec3>& points,
                                       int workers = 1);

/// Green's representation of the field exterior to the interface.
cplx represent_exterior(const ArtificialInterface& iface, const CauchyData& cauchy, double kappa, const Vec3& x);

/// n points of a Fibonacci lattice on the sphere of the given radius about
/// the origin.
std::vector<Vec3> fibonacci_sphere(int n, double radius);

}  // namespace roughscat::interface
