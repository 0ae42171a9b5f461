#pragma once

#include "roughscat/common.hpp"

namespace roughscat::bem {

/// Plane incident wave exp(-i kappa <d, x>) and the CFIE coupling eta.
struct WaveSetup {
  double kappa = 1.0;
  Vec3 direction = Vec3::UnitX();
  double eta = 0.5;
};

/// Requires kappa > 0 and |d| = 1 to 1e-12; sets eta = kappa / 2.
WaveSetup make_wave(double kappa, const Vec3& direction);

/// exp(-i kappa r) / (4 pi r) with r = |x - z|.  Throws InvalidArgument for
/// coincident points.
cplx fundamental_solution(double kappa, const Vec3& x, const Vec3& z);

/// grad_x Phi(x, z) = Phi (-i kappa - 1/r) (x - z) / r.
Vec3c fundamental_solution_gradient(double kappa, const Vec3& x, const Vec3& z);

cplx incident_wave(const WaveSetup& wave, const Vec3& x);
Vec3c incident_gradient(const WaveSetup& wave, const Vec3& x);

}  // namespace roughscat::bem
