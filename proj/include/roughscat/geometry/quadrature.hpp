#pragma once

#include <vector>

#include "roughscat/geometry/interpolated_surface.hpp"

namespace roughscat::geometry {

struct QuadraturePoint {
  double s, t;
  Vec3 point;
  Vec3 normal;
  double weight;  // Gauss weight times area element
};

/// Tensor Gauss-Legendre rule with `order` points per direction over the
/// parameter square of one patch.
std::vector<QuadraturePoint> patch_quadrature(const InterpolatedSurface& surf, int patch, int order);

/// Same rule over the sub-square [s0, s0 + h] x [t0, t0 + h].
std::vector<QuadraturePoint> square_quadrature(const InterpolatedSurface& surf, int patch, double s0, double t0,
                                               double h, int order);

/// Sum of the area weights over all patches.
double surface_area(const InterpolatedSurface& surf, int order);

}  // namespace roughscat::geometry
