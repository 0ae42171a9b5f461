#include <cmath>

#include "roughscat/common.hpp"
#include "roughscat/simd/kernels.hpp"

namespace roughscat::simd {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

void layer_combination(const double* t, const double* n, double kappa, double beta, double gr, double gi,
                       const Sources& s, double* out_re, double* out_im) {
  for (int q = 0; q < s.count; ++q) {
    const double dx = t[0] - s.x[q], dy = t[1] - s.y[q], dz = t[2] - s.z[q];
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) {
      out_re[q] = out_im[q] = 0.0;
      continue;
    }
    const double r = std::sqrt(r2);
    const double inv_r = 1.0 / r;
    const double c = std::cos(kappa * r), sn = std::sin(kappa * r);
    // Phi = (c - i sn) / (4 pi r)
    const double pr = c * inv_r * kInv4Pi, pi = -sn * inv_r * kInv4Pi;
    // dPhi/dn_x = Phi (-i k - 1/r) (x - z).n / r
    const double proj = (dx * n[0] + dy * n[1] + dz * n[2]) * inv_r;
    const double fr = -inv_r * proj, fi = -kappa * proj;
    const double dr = pr * fr - pi * fi, di = pr * fi + pi * fr;
    out_re[q] = s.w[q] * (beta * dr + gr * pr - gi * pi);
    out_im[q] = s.w[q] * (beta * di + gr * pi + gi * pr);
  }
}

void single_layer_sum(const double* t, double kappa, const Sources& s, const double* rho_re, const double* rho_im,
                      double* acc) {
  double vr = 0, vi = 0, gxr = 0, gxi = 0, gyr = 0, gyi = 0, gzr = 0, gzi = 0;
  for (int q = 0; q < s.count; ++q) {
    const double dx = t[0] - s.x[q], dy = t[1] - s.y[q], dz = t[2] - s.z[q];
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) continue;
    const double r = std::sqrt(r2);
    const double inv_r = 1.0 / r;
    const double c = std::cos(kappa * r), sn = std::sin(kappa * r);
    const double pr = c * inv_r * kInv4Pi, pi = -sn * inv_r * kInv4Pi;
    const double ar = pr * rho_re[q] - pi * rho_im[q];
    const double ai = pr * rho_im[q] + pi * rho_re[q];
    vr += ar;
    vi += ai;
    // grad = Phi rho (-i k - 1/r) (x - z) / r
    const double br = (-inv_r * ar + kappa * ai) * inv_r;
    const double bi = (-inv_r * ai - kappa * ar) * inv_r;
    gxr += br * dx;
    gxi += bi * dx;
    gyr += br * dy;
    gyi += bi * dy;
    gzr += br * dz;
    gzi += bi * dz;
  }
  acc[0] += vr;
  acc[1] += vi;
  acc[2] += gxr;
  acc[3] += gxi;
  acc[4] += gyr;
  acc[5] += gyi;
  acc[6] += gzr;
  acc[7] += gzi;
}

void representation_row(const double* t, double kappa, const Sources& s, double* g_re, double* g_im, double* h_re,
                        double* h_im) {
  for (int q = 0; q < s.count; ++q) {
    const double dx = t[0] - s.x[q], dy = t[1] - s.y[q], dz = t[2] - s.z[q];
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) {
      g_re[q] = g_im[q] = h_re[q] = h_im[q] = 0.0;
      continue;
    }
    const double r = std::sqrt(r2);
    const double inv_r = 1.0 / r;
    const double c = std::cos(kappa * r), sn = std::sin(kappa * r);
    const double pr = c * inv_r * kInv4Pi * s.w[q], pi = -sn * inv_r * kInv4Pi * s.w[q];
    // dPhi/dn_z = Phi (-i k - 1/r) (z - x).n_z / r
    const double proj = -(dx * s.nx[q] + dy * s.ny[q] + dz * s.nz[q]) * inv_r;
    const double fr = -inv_r * proj, fi = -kappa * proj;
    g_re[q] = pr * fr - pi * fi;
    g_im[q] = pr * fi + pi * fr;
    h_re[q] = -pr;
    h_im[q] = -pi;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{layer_combination, single_layer_sum, representation_row};
  return table;
}

}  // namespace roughscat::simd
