#include "roughscat/bem/wave.hpp"

#include <cmath>

namespace roughscat::bem {

WaveSetup make_wave(double kappa, const Vec3& direction) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("make_wave: wavenumber must be positive");
  if (!direction.allFinite() || std::abs(direction.norm() - 1.0) > 1e-12) {
    throw InvalidArgument("make_wave: incident direction must be a unit vector");
  }
  return {kappa, direction, kappa / 2.0};
}

cplx fundamental_solution(double kappa, const Vec3& x, const Vec3& z) {
  const double r = (x - z).norm();
  if (r == 0.0) throw InvalidArgument("fundamental_solution: coincident points");
  return std::polar(1.0 / (4.0 * kPi * r), -kappa * r);
}

Vec3c fundamental_solution_gradient(double kappa, const Vec3& x, const Vec3& z) {
  const Vec3 d = x - z;
  const double r = d.norm();
  const cplx phi = fundamental_solution(kappa, x, z);
  const cplx f = phi * cplx(-1.0 / r, -kappa) / r;
  return f * d.cast<cplx>();
}

cplx incident_wave(const WaveSetup& wave, const Vec3& x) { return std::polar(1.0, -wave.kappa * wave.direction.dot(x)); }

Vec3c incident_gradient(const WaveSetup& wave, const Vec3& x) {
  return (cplx(0.0, -wave.kappa) * incident_wave(wave, x)) * wave.direction.cast<cplx>();
}

}  // namespace roughscat::bem
