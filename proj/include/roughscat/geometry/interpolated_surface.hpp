#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "roughscat/geometry/landmarks.hpp"

namespace roughscat::geometry {

/// Local geometry of a surface point.
struct SurfaceFrame {
  Vec3 point;
  Vec3 ds;      // d/ds of the patch map
  Vec3 dt;      // d/dt of the patch map
  Vec3 normal;  // unit, outward
  double area;  // |ds x dt|
};

/// A surface given patchwise by tensor barycentric interpolation of nodal
/// values on a shared Chebyshev grid.
///
/// Immutable after construction; all member functions are safe to call
/// concurrently.
class InterpolatedSurface {
 public:
  InterpolatedSurface(ChebyshevGrid grid, std::vector<std::vector<Vec3>> nodal, std::vector<int> orientation);

  [[nodiscard]] int num_patches() const { return static_cast<int>(nodal_.size()); }
  [[nodiscard]] const ChebyshevGrid& grid() const { return grid_; }
  [[nodiscard]] int orientation(int patch) const { return orientation_[patch]; }
  [[nodiscard]] const Eigen::Matrix3Xd& nodal(int patch) const { return nodal_[patch]; }

  [[nodiscard]] Vec3 eval(int patch, double s, double t) const;

  /// Point, tangents from the differentiated interpolant, outward unit
  /// normal and area element.  Throws NumericalError on degenerate tangents.
  [[nodiscard]] SurfaceFrame frame(int patch, double s, double t) const;

  /// frame() at many parameters of one patch; agrees with it to rounding.
  [[nodiscard]] std::vector<SurfaceFrame> frames(int patch, std::span<const double> s,
                                                 std::span<const double> t) const;

  /// Largest |x|_inf over all nodal values.
  [[nodiscard]] double max_abs_coordinate() const;

 private:
  ChebyshevGrid grid_;
  Eigen::MatrixXd diff_;  // differentiation matrix of grid_
  std::vector<double> diff_t_;  // D stored row by row
  std::vector<Eigen::Matrix3Xd> nodal_;
  std::vector<int> orientation_;
};

/// Builds the interpolant of per-patch nodal grids conforming to `landmarks`.
/// Values belonging to one global landmark must agree within the merge
/// tolerance; otherwise the surface would tear and InvalidArgument is thrown.
InterpolatedSurface surface_from_nodal(const LandmarkSet& landmarks, const std::vector<std::vector<Vec3>>& nodal);

/// Builds the interpolant from one coordinate per global landmark.
InterpolatedSurface surface_from_global(const LandmarkSet& landmarks, const std::vector<Vec3>& global_points);

/// Same as `surf.frame(patch, s, t)`.
inline SurfaceFrame surface_jacobian_normal(const InterpolatedSurface& surf, int patch, double s, double t) {
  return surf.frame(patch, s, t);
}

}  // namespace roughscat::geometry
