#include "roughscat/geometry/quadrature.hpp"

#include "roughscat/geometry/gauss.hpp"

namespace roughscat::geometry {

std::vector<QuadraturePoint> square_quadrature(const InterpolatedSurface& surf, int patch, double s0, double t0,
                                               double h, int order) {
  if (order < 1) throw InvalidArgument("patch_quadrature: order must be >= 1");
  const GaussRule& g = gauss_legendre(order);
  std::vector<QuadraturePoint> out;
  out.reserve(order * order);
  for (int j = 0; j < order; ++j) {
    for (int i = 0; i < order; ++i) {
      const double s = s0 + h * g.nodes[i];
      const double t = t0 + h * g.nodes[j];
      const SurfaceFrame f = surf.frame(patch, s, t);
      out.push_back({s, t, f.point, f.normal, h * h * g.weights[i] * g.weights[j] * f.area});
    }
  }
  return out;
}

std::vector<QuadraturePoint> patch_quadrature(const InterpolatedSurface& surf, int patch, int order) {
  return square_quadrature(surf, patch, 0.0, 0.0, 1.0, order);
}

double surface_area(const InterpolatedSurface& surf, int order) {
  double a = 0.0;
  for (int p = 0; p < surf.num_patches(); ++p) {
    for (const auto& qp : patch_quadrature(surf, p, order)) a += qp.weight;
  }
  return a;
}

}  // namespace roughscat::geometry
