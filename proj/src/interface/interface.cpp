#include "roughscat/interface/interface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roughscat/bem/potential.hpp"
#include "roughscat/geometry/landmarks.hpp"
#include "roughscat/geometry/quadrature.hpp"
#include "roughscat/parallel.hpp"
#include "roughscat/simd/kernels.hpp"

namespace roughscat::interface {

ArtificialInterface::ArtificialInterface(double half_width, int grid, double margin)
    : half_width_(half_width), grid_(grid), margin_(margin) {
  if (!(half_width > 0.0)) throw InvalidArgument("ArtificialInterface: half-width must be positive");
  if (grid < 1) throw InvalidArgument("ArtificialInterface: grid size must be >= 1");
  if (!(margin >= 0.0 && margin < half_width)) throw InvalidArgument("ArtificialInterface: invalid margin");
  surface_ = geometry::make_cuboid(half_width);
  // The faces are bilinear, so the q = 1 re-interpolation is exact.
  const geometry::LandmarkSet lm = geometry::build_landmarks(surface_, 1);
  const geometry::InterpolatedSurface surf = geometry::surface_from_global(lm, lm.points);
  points_.resize(surface_.size() * grid * grid);
  int k = 0;
  for (int p = 0; p < surface_.size(); ++p) {
    for (const auto& qp : geometry::patch_quadrature(surf, p, grid)) points_.set(k++, qp.point, qp.normal, qp.weight);
  }
}

void ArtificialInterface::check_enclosure(double sup_norm) const {
  if (!(sup_norm < half_width_ - margin_)) {
    std::ostringstream msg;
    msg << "realization leaves the artificial interface: sup-norm " << sup_norm << " >= " << half_width_ - margin_;
    throw EnclosureError(msg.str());
  }
}

bool ArtificialInterface::outside(const Vec3& x) const { return x.cwiseAbs().maxCoeff() > half_width_; }

Eigen::VectorXcd CauchyData::stacked() const {
  Eigen::VectorXcd c(2 * size());
  c << value, normal_derivative;
  return c;
}

CauchyData cauchy_from_trace(const bem::BoundaryDiscretization& disc, const bem::NeumannTrace& trace, double kappa,
                             const ArtificialInterface& iface, int workers, int eval_order) {
  iface.check_enclosure(disc.surface().max_abs_coordinate());
  const bem::PotentialEvaluator ev(disc, trace.coefficients, kappa, eval_order);
  const int n = iface.size();
  CauchyData out{Eigen::VectorXcd(n), Eigen::VectorXcd(n)};
  constexpr int kChunk = 64;
  parallel_for((n + kChunk - 1) / kChunk, workers, [&](int c) {
    for (int k = c * kChunk; k < std::min(n, (c + 1) * kChunk); ++k) {
      cplx v;
      Vec3c g;
      ev.value_and_gradient(iface.point(k), v, g);
      const Vec3 nk = iface.normal(k);
      out.value[k] = v;
      out.normal_derivative[k] = g[0] * nk[0] + g[1] * nk[1] + g[2] * nk[2];
    }
  });
  return out;
}

Eigen::VectorXcd representation_row(const ArtificialInterface& iface, double kappa, const Vec3& x) {
  if (!x.allFinite() || !iface.outside(x)) {
    throw InvalidArgument("representation formula needs a point strictly outside the artificial interface");
  }
  const int n = iface.size();
  std::vector<double> g_re(n), g_im(n), h_re(n), h_im(n);
  simd::kernels().representation_row(x.data(), kappa, iface.points().sources(), g_re.data(), g_im.data(),
                                     h_re.data(), h_im.data());
  Eigen::VectorXcd a(2 * n);
  for (int k = 0; k < n; ++k) {
    a[k] = cplx(g_re[k], g_im[k]);
    a[n + k] = cplx(h_re[k], h_im[k]);
  }
  return a;
}

Eigen::MatrixXcd representation_matrix(const ArtificialInterface& iface, double kappa, const std::vector<Vec3>& points,
                                       int workers) {
  Eigen::MatrixXcd a(points.size(), 2 * iface.size());
  parallel_for(static_cast<int>(points.size()), workers,
               [&](int i) { a.row(i) = representation_row(iface, kappa, points[i]).transpose(); });
  return a;
}

cplx represent_exterior(const ArtificialInterface& iface, const CauchyData& cauchy, double kappa, const Vec3& x) {
  if (cauchy.size() != iface.size() || cauchy.normal_derivative.size() != iface.size()) {
    throw InvalidArgument("represent_exterior: Cauchy data does not match the interface grid");
  }
  const Eigen::VectorXcd a = representation_row(iface, kappa, x);
  const int n = iface.size();
  return (a.head(n).array() * cauchy.value.array()).sum() +
         (a.tail(n).array() * cauchy.normal_derivative.array()).sum();
}

std::vector<Vec3> fibonacci_sphere(int n, double radius) {
  if (n < 1 || !(radius > 0.0)) throw InvalidArgument("fibonacci_sphere: need n >= 1 and a positive radius");
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    pts.emplace_back(radius * r * std::cos(golden * k), radius * r * std::sin(golden * k), radius * z);
  }
  return pts;
}

}  // namespace roughscat::interface
