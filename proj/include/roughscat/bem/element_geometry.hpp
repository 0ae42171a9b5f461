#pragma once

#include <vector>

#include "roughscat/bem/discretization.hpp"
#include "roughscat/bem/local_rules.hpp"
#include "roughscat/simd/kernels.hpp"

namespace roughscat::bem {

/// Quadrature points mapped onto the surface, structure of arrays.  `w` is
/// the rule weight times the local Jacobian.
struct PointCloud {
  std::vector<double> x, y, z, nx, ny, nz, w;

  [[nodiscard]] int size() const { return static_cast<int>(w.size()); }
  void resize(int n);
  void set(int k, const Vec3& point, const Vec3& normal, double weight);
  [[nodiscard]] Vec3 point(int k) const { return {x[k], y[k], z[k]}; }
  [[nodiscard]] simd::Sources sources() const;
  /// Sources restricted to [begin, begin + count).
  [[nodiscard]] simd::Sources sources(int begin, int count) const;
};

/// Maps `rule` onto element e by direct surface evaluation.
PointCloud map_rule(const BoundaryDiscretization& disc, int e, const LocalRule& rule);

/// Maps the same local rule onto every element.  Elements at the same
/// position within their patch share cardinal matrices, so the evaluation is
/// a matrix product over all patches at once.
std::vector<PointCloud> map_rule_all(const BoundaryDiscretization& disc, const LocalRule& rule);

struct ClosestPoint {
  double u = 0.0;
  double v = 0.0;
  Vec3 point;
  double distance = 0.0;
};

/// Closest point to x on element e by projected Gauss-Newton iteration from
/// the starting guess (u0, v0).
ClosestPoint closest_point(const BoundaryDiscretization& disc, int e, const Vec3& x, double u0, double v0);

}  // namespace roughscat::bem
