#pragma once

#include <string>

namespace roughscat::simd {

/// Structure-of-arrays view of quadrature sources.  Normals may be null for
/// kernels that do not use them.
struct Sources {
  const double* x;
  const double* y;
  const double* z;
  const double* nx;
  const double* ny;
  const double* nz;
  const double* w;
  int count;
};

/// Helmholtz kernels with Phi(x, z) = exp(-i k r) / (4 pi r).  Coincident
/// points (r == 0) contribute zero.
struct KernelTable {
  /// out_q = w_q * (beta dPhi/dn_x + gamma Phi)(x, z_q) with n_x = `normal`
  /// and gamma = gamma_re + i gamma_im.
  void (*layer_combination)(const double* target, const double* normal, double kappa, double beta,
                            double gamma_re, double gamma_im, const Sources& src, double* out_re, double* out_im);

  /// Accumulates sum_q Phi(x, z_q) rho_q and sum_q grad_x Phi(x, z_q) rho_q.
  /// `rho` already includes quadrature weights.  acc = [value, gx, gy, gz] as
  /// (re, im) pairs.
  void (*single_layer_sum)(const double* target, double kappa, const Sources& src, const double* rho_re,
                           const double* rho_im, double* acc);

  /// g_q = w_q dPhi(x, z_q)/dn_z  and  h_q = -w_q Phi(x, z_q).
  void (*representation_row)(const double* target, double kappa, const Sources& src, double* g_re, double* g_im,
                             double* h_re, double* h_im);
};

enum class Isa { kScalar, kAvx2 };

const KernelTable& scalar_kernels();
/// Null when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_kernels();

/// Kernels used by the library: AVX2 when available unless the environment
/// variable ROUGHSCAT_SIMD=scalar is set.
const KernelTable& kernels();
Isa active_isa();
std::string isa_name(Isa isa);

}  // namespace roughscat::simd
