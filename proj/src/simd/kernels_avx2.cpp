#include <immintrin.h>

#include "roughscat/common.hpp"
#include "roughscat/simd/kernels.hpp"

namespace roughscat::simd {

namespace {

// Cephes-style sincos for non-negative arguments of moderate size
// (kappa * r stays well below 1e6 in practice).
inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d fopi = _mm256_set1_pd(1.27323954473516268615);
  const __m256d dp1 = _mm256_set1_pd(7.85398125648498535156E-1);
  const __m256d dp2 = _mm256_set1_pd(3.77489470793079817668E-8);
  const __m256d dp3 = _mm256_set1_pd(2.69515142907905952645E-15);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);

  __m256d y = _mm256_floor_pd(_mm256_mul_pd(x, fopi));
  // Round odd octants up so the reduced argument lies in [-pi/4, pi/4].
  const __m256d yh = _mm256_floor_pd(_mm256_mul_pd(y, half));
  const __m256d odd = _mm256_sub_pd(y, _mm256_add_pd(yh, yh));
  y = _mm256_add_pd(y, odd);

  __m256d z = _mm256_fnmadd_pd(y, dp1, x);
  z = _mm256_fnmadd_pd(y, dp2, z);
  z = _mm256_fnmadd_pd(y, dp3, z);
  const __m256d zz = _mm256_mul_pd(z, z);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060E-10);
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-2.50507477628578072866E-8));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(2.75573136213857245213E-6));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.98412698295895385996E-4));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(8.33333333332211858878E-3));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.66666666666666307295E-1));
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), ps, z);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300E-11);
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.08757008419747316778E-9));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-2.75573141792967388112E-7));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.48015872888517045348E-5));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-1.38888888888730564116E-3));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(4.16666666666665929218E-2));
  const __m256d c = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), pc, _mm256_fnmadd_pd(half, zz, one));

  // Quadrant index (y / 2) mod 4.
  const __m256d k = _mm256_mul_pd(y, half);
  const __m256d quad = _mm256_sub_pd(k, _mm256_mul_pd(_mm256_set1_pd(4.0), _mm256_floor_pd(_mm256_mul_pd(k, _mm256_set1_pd(0.25)))));
  const __m256d q1 = _mm256_cmp_pd(quad, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
  const __m256d q2 = _mm256_cmp_pd(quad, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d q3 = _mm256_cmp_pd(quad, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
  const __m256d odd_q = _mm256_or_pd(q1, q3);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d sv = _mm256_blendv_pd(s, c, odd_q);
  __m256d cv = _mm256_blendv_pd(c, s, odd_q);
  sv = _mm256_xor_pd(sv, _mm256_and_pd(sign_mask, _mm256_or_pd(q2, q3)));
  cv = _mm256_xor_pd(cv, _mm256_and_pd(sign_mask, _mm256_or_pd(q1, q2)));
  s_out = sv;
  c_out = cv;
}

struct Geometry4 {
  __m256d dx, dy, dz, inv_r, zero_mask;  // zero_mask: lanes with r == 0
  __m256d pr, pi;                        // Phi / (unit weight)
};

inline Geometry4 geometry4(const double* t, double kappa, const Sources& s, int q) {
  Geometry4 g;
  g.dx = _mm256_sub_pd(_mm256_set1_pd(t[0]), _mm256_loadu_pd(s.x + q));
  g.dy = _mm256_sub_pd(_mm256_set1_pd(t[1]), _mm256_loadu_pd(s.y + q));
  g.dz = _mm256_sub_pd(_mm256_set1_pd(t[2]), _mm256_loadu_pd(s.z + q));
  __m256d r2 = _mm256_mul_pd(g.dx, g.dx);
  r2 = _mm256_fmadd_pd(g.dy, g.dy, r2);
  r2 = _mm256_fmadd_pd(g.dz, g.dz, r2);
  const __m256d one = _mm256_set1_pd(1.0);
  g.zero_mask = _mm256_cmp_pd(r2, _mm256_setzero_pd(), _CMP_EQ_OQ);
  r2 = _mm256_blendv_pd(r2, one, g.zero_mask);
  const __m256d r = _mm256_sqrt_pd(r2);
  g.inv_r = _mm256_div_pd(one, r);
  __m256d sn, c;
  sincos4(_mm256_mul_pd(_mm256_set1_pd(kappa), r), sn, c);
  const __m256d scale = _mm256_mul_pd(g.inv_r, _mm256_set1_pd(1.0 / (4.0 * kPi)));
  g.pr = _mm256_mul_pd(c, scale);
  g.pi = _mm256_xor_pd(_mm256_mul_pd(sn, scale), _mm256_set1_pd(-0.0));
  return g;
}

inline __m256d mask_out(__m256d v, __m256d zero_mask) { return _mm256_andnot_pd(zero_mask, v); }

Sources tail(const Sources& s, int offset) {
  Sources t = s;
  t.x += offset;
  t.y += offset;
  t.z += offset;
  if (t.nx) t.nx += offset;
  if (t.ny) t.ny += offset;
  if (t.nz) t.nz += offset;
  if (t.w) t.w += offset;
  t.count = s.count - offset;
  return t;
}

void layer_combination(const double* t, const double* n, double kappa, double beta, double gr, double gi,
                       const Sources& s, double* out_re, double* out_im) {
  const __m256d vk = _mm256_set1_pd(kappa), vb = _mm256_set1_pd(beta);
  const __m256d vgr = _mm256_set1_pd(gr), vgi = _mm256_set1_pd(gi);
  const __m256d nx = _mm256_set1_pd(n[0]), ny = _mm256_set1_pd(n[1]), nz = _mm256_set1_pd(n[2]);
  int q = 0;
  for (; q + 4 <= s.count; q += 4) {
    const Geometry4 g = geometry4(t, kappa, s, q);
    __m256d proj = _mm256_mul_pd(g.dx, nx);
    proj = _mm256_fmadd_pd(g.dy, ny, proj);
    proj = _mm256_fmadd_pd(g.dz, nz, proj);
    proj = _mm256_mul_pd(proj, g.inv_r);
    const __m256d fr = _mm256_xor_pd(_mm256_mul_pd(g.inv_r, proj), _mm256_set1_pd(-0.0));
    const __m256d fi = _mm256_xor_pd(_mm256_mul_pd(vk, proj), _mm256_set1_pd(-0.0));
    const __m256d dr = _mm256_fmsub_pd(g.pr, fr, _mm256_mul_pd(g.pi, fi));
    const __m256d di = _mm256_fmadd_pd(g.pr, fi, _mm256_mul_pd(g.pi, fr));
    const __m256d w = _mm256_loadu_pd(s.w + q);
    const __m256d cr = _mm256_fmsub_pd(vgr, g.pr, _mm256_mul_pd(vgi, g.pi));
    const __m256d ci = _mm256_fmadd_pd(vgr, g.pi, _mm256_mul_pd(vgi, g.pr));
    const __m256d re = _mm256_mul_pd(w, _mm256_fmadd_pd(vb, dr, cr));
    const __m256d im = _mm256_mul_pd(w, _mm256_fmadd_pd(vb, di, ci));
    _mm256_storeu_pd(out_re + q, mask_out(re, g.zero_mask));
    _mm256_storeu_pd(out_im + q, mask_out(im, g.zero_mask));
  }
  if (q < s.count) scalar_kernels().layer_combination(t, n, kappa, beta, gr, gi, tail(s, q), out_re + q, out_im + q);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void single_layer_sum(const double* t, double kappa, const Sources& s, const double* rho_re, const double* rho_im,
                      double* acc) {
  const __m256d vk = _mm256_set1_pd(kappa);
  __m256d vr = _mm256_setzero_pd(), vi = vr, gxr = vr, gxi = vr, gyr = vr, gyi = vr, gzr = vr, gzi = vr;
  int q = 0;
  for (; q + 4 <= s.count; q += 4) {
    const Geometry4 g = geometry4(t, kappa, s, q);
    const __m256d rr = _mm256_loadu_pd(rho_re + q), ri = _mm256_loadu_pd(rho_im + q);
    const __m256d ar = mask_out(_mm256_fmsub_pd(g.pr, rr, _mm256_mul_pd(g.pi, ri)), g.zero_mask);
    const __m256d ai = mask_out(_mm256_fmadd_pd(g.pr, ri, _mm256_mul_pd(g.pi, rr)), g.zero_mask);
    vr = _mm256_add_pd(vr, ar);
    vi = _mm256_add_pd(vi, ai);
    const __m256d br = _mm256_mul_pd(_mm256_fmsub_pd(vk, ai, _mm256_mul_pd(g.inv_r, ar)), g.inv_r);
    const __m256d bi = _mm256_mul_pd(_mm256_xor_pd(_mm256_fmadd_pd(g.inv_r, ai, _mm256_mul_pd(vk, ar)),
                                                   _mm256_set1_pd(-0.0)),
                                     g.inv_r);
    gxr = _mm256_fmadd_pd(br, g.dx, gxr);
    gxi = _mm256_fmadd_pd(bi, g.dx, gxi);
    gyr = _mm256_fmadd_pd(br, g.dy, gyr);
    gyi = _mm256_fmadd_pd(bi, g.dy, gyi);
    gzr = _mm256_fmadd_pd(br, g.dz, gzr);
    gzi = _mm256_fmadd_pd(bi, g.dz, gzi);
  }
  acc[0] += hsum(vr);
  acc[1] += hsum(vi);
  acc[2] += hsum(gxr);
  acc[3] += hsum(gxi);
  acc[4] += hsum(gyr);
  acc[5] += hsum(gyi);
  acc[6] += hsum(gzr);
  acc[7] += hsum(gzi);
  if (q < s.count) scalar_kernels().single_layer_sum(t, kappa, tail(s, q), rho_re + q, rho_im + q, acc);
}

void representation_row(const double* t, double kappa, const Sources& s, double* g_re, double* g_im, double* h_re,
                        double* h_im) {
  const __m256d vk = _mm256_set1_pd(kappa);
  int q = 0;
  for (; q + 4 <= s.count; q += 4) {
    const Geometry4 g = geometry4(t, kappa, s, q);
    const __m256d w = _mm256_loadu_pd(s.w + q);
    const __m256d pr = _mm256_mul_pd(g.pr, w), pi = _mm256_mul_pd(g.pi, w);
    __m256d proj = _mm256_mul_pd(g.dx, _mm256_loadu_pd(s.nx + q));
    proj = _mm256_fmadd_pd(g.dy, _mm256_loadu_pd(s.ny + q), proj);
    proj = _mm256_fmadd_pd(g.dz, _mm256_loadu_pd(s.nz + q), proj);
    // proj here is (x - z).n_z / r; the scalar kernel uses its negative.
    proj = _mm256_mul_pd(proj, g.inv_r);
    const __m256d fr = _mm256_mul_pd(g.inv_r, proj);
    const __m256d fi = _mm256_mul_pd(vk, proj);
    _mm256_storeu_pd(g_re + q, mask_out(_mm256_fmsub_pd(pr, fr, _mm256_mul_pd(pi, fi)), g.zero_mask));
    _mm256_storeu_pd(g_im + q, mask_out(_mm256_fmadd_pd(pr, fi, _mm256_mul_pd(pi, fr)), g.zero_mask));
    const __m256d neg = _mm256_set1_pd(-0.0);
    _mm256_storeu_pd(h_re + q, mask_out(_mm256_xor_pd(pr, neg), g.zero_mask));
    _mm256_storeu_pd(h_im + q, mask_out(_mm256_xor_pd(pi, neg), g.zero_mask));
  }
  if (q < s.count) scalar_kernels().representation_row(t, kappa, tail(s, q), g_re + q, g_im + q, h_re + q, h_im + q);
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{layer_combination, single_layer_sum, representation_row};
  return table;
}

}  // namespace roughscat::simd
