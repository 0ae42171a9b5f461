#pragma once

#include <variant>
#include <vector>

#include "roughscat/common.hpp"

namespace roughscat::geometry {

/// Tensor-product rational B-spline patch over the unit square.
///
/// Control points are stored with the u index running fastest:
/// `control[i + rows * j]` for 0 <= i < rows (u), 0 <= j < cols (v), where
/// rows = knots_u.size() - degree_u - 1 and cols = knots_v.size() - degree_v - 1.
struct NurbsPatch {
  int degree_u = 1;
  int degree_v = 1;
  std::vector<double> knots_u;
  std::vector<double> knots_v;
  std::vector<Vec3> control;
  std::vector<double> weights;

  [[nodiscard]] int rows() const { return static_cast<int>(knots_u.size()) - degree_u - 1; }
  [[nodiscard]] int cols() const { return static_cast<int>(knots_v.size()) - degree_v - 1; }

  /// Throws InvalidArgument when knots, weights or net sizes are inconsistent.
  void validate() const;

  [[nodiscard]] Vec3 eval(double s, double t) const;
};

/// Nonzero B-spline basis functions of `degree` at x (Cox-de Boor).
/// Returns the knot span index; `basis` receives degree + 1 values for
/// functions span - degree .. span.
int bspline_basis(const std::vector<double>& knots, int degree, double x, std::vector<double>& basis);

/// One face of a cube projected radially onto a sphere, with equiangular
/// spacing of the face parameters.
struct CubeSphereFace {
  int face = 0;  // 0..5: +x, -x, +y, -y, +z, -z
  double radius = 1.0;
  Vec3 center = Vec3::Zero();

  [[nodiscard]] Vec3 eval(double s, double t) const;
};

/// A single smooth patch map s_i: [0,1]^2 -> R^3.
class PatchMap {
 public:
  PatchMap(NurbsPatch nurbs) : map_(std::move(nurbs)) {}
  PatchMap(CubeSphereFace face) : map_(face) {}

  /// Rejects parameters outside the unit square.
  [[nodiscard]] Vec3 eval(double s, double t) const;

  /// Cross product of the two tangents (central differences), used for
  /// orientation and immersion checks only.
  [[nodiscard]] Vec3 approximate_normal(double s, double t) const;

  [[nodiscard]] const NurbsPatch* nurbs() const { return std::get_if<NurbsPatch>(&map_); }

  /// Throws InvalidArgument if the tangents are linearly dependent somewhere
  /// on a fixed sampling grid.
  void check_immersion() const;

 private:
  std::variant<NurbsPatch, CubeSphereFace> map_;
};

Vec3 patch_eval(const PatchMap& patch, double s, double t);

}  // namespace roughscat::geometry
