#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "roughscat/common.hpp"
#include "roughscat/simd/kernels.hpp"

using namespace roughscat;
using namespace roughscat::simd;

namespace {

struct RandomSources {
  std::vector<double> x, y, z, nx, ny, nz, w, rho_re, rho_im;
  Sources view() const { return {x.data(), y.data(), z.data(), nx.data(), ny.data(), nz.data(), w.data(), int(w.size())}; }
};

// Random sources in a shell of radius up to `spread`; entry 3 coincides with
// the target so the r = 0 guard is exercised inside a vector block.
RandomSources make_sources(int n, double spread, const double* target, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomSources s;
  for (int k = 0; k < n; ++k) {
    s.x.push_back(spread * u(gen));
    s.y.push_back(spread * u(gen));
    s.z.push_back(spread * u(gen));
    Vec3 nrm(u(gen), u(gen), u(gen));
    nrm.normalize();
    s.nx.push_back(nrm.x());
    s.ny.push_back(nrm.y());
    s.nz.push_back(nrm.z());
    s.w.push_back(0.5 + 0.5 * u(gen));
    s.rho_re.push_back(u(gen));
    s.rho_im.push_back(u(gen));
  }
  if (n > 3) {
    s.x[3] = target[0];
    s.y[3] = target[1];
    s.z[3] = target[2];
  }
  return s;
}

// Max complex difference relative to the largest reference magnitude.  The
// comparison is on complex values because real or imaginary parts alone can
// cancel to far below the magnitude (e.g. at tiny kappa).
double rel_diff(const std::vector<double>& are, const std::vector<double>& aim, const std::vector<double>& bre,
                const std::vector<double>& bim) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < are.size(); ++k) {
    num = std::max(num, std::abs(cplx(are[k] - bre[k], aim[k] - bim[k])));
    den = std::max(den, std::abs(cplx(are[k], aim[k])));
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace

TEST_CASE("scalar layer kernel matches the closed form") {
  const double t[3] = {0.1, -0.2, 0.3};
  const double n[3] = {0.0, 0.0, 1.0};
  const double z[3] = {0.1, -0.2, 1.3};  // r = 1, (x - z).n = -1
  const double one = 1.0, zero = 0.0;
  const Sources src{&z[0], &z[1], &z[2], &zero, &zero, &one, &one, 1};
  double re, im;
  const double kappa = 5.0;
  scalar_kernels().layer_combination(t, n, kappa, 0.0, 1.0, 0.0, src, &re, &im);
  const cplx phi = std::polar(1.0 / (4 * kPi), -kappa);
  CHECK(re == doctest::Approx(phi.real()).epsilon(1e-14));
  CHECK(im == doctest::Approx(phi.imag()).epsilon(1e-14));
  scalar_kernels().layer_combination(t, n, kappa, 1.0, 0.0, 0.0, src, &re, &im);
  const cplx dn = phi * cplx(-1.0, -kappa) * (-1.0);
  CHECK(re == doctest::Approx(dn.real()).epsilon(1e-14));
  CHECK(im == doctest::Approx(dn.imag()).epsilon(1e-14));
}

TEST_CASE("coincident points contribute zero") {
  const double t[3] = {1.0, 2.0, 3.0};
  const double n[3] = {1.0, 0.0, 0.0};
  const double w = 1.0;
  const Sources src{&t[0], &t[1], &t[2], &n[0], &n[1], &n[2], &w, 1};
  double re = 7, im = 7;
  scalar_kernels().layer_combination(t, n, 2.0, 1.0, 0.0, -1.0, src, &re, &im);
  CHECK(re == 0.0);
  CHECK(im == 0.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const KernelTable* avx = avx2_kernels();
  if (!avx) {
    MESSAGE("AVX2 not available, equivalence test skipped");
    return;
  }
  const double target[3] = {0.3, -0.1, 0.2};
  const double normal[3] = {0.0, 0.6, 0.8};
  for (int n : {1, 3, 4, 5, 8, 13, 64, 257}) {
    for (double kappa : {0.0, 1e-6, 2.0, 5.0, 40.0}) {
      const RandomSources s = make_sources(n, 3.0, target, 100u + n);
      const Sources v = s.view();
      std::vector<double> a_re(n), a_im(n), b_re(n), b_im(n);
      scalar_kernels().layer_combination(target, normal, kappa, 1.0, 0.3, -kappa / 2, v, a_re.data(), a_im.data());
      avx->layer_combination(target, normal, kappa, 1.0, 0.3, -kappa / 2, v, b_re.data(), b_im.data());
      CHECK(rel_diff(a_re, a_im, b_re, b_im) < 1e-13);

      std::vector<double> acc_a(8, 0.0), acc_b(8, 0.0);
      scalar_kernels().single_layer_sum(target, kappa, v, s.rho_re.data(), s.rho_im.data(), acc_a.data());
      avx->single_layer_sum(target, kappa, v, s.rho_re.data(), s.rho_im.data(), acc_b.data());
      for (int c = 0; c < 4; ++c) {
        const double scale = std::abs(cplx(acc_a[0], acc_a[1])) + std::abs(cplx(acc_a[2 * c], acc_a[2 * c + 1]));
        CHECK(std::abs(cplx(acc_a[2 * c] - acc_b[2 * c], acc_a[2 * c + 1] - acc_b[2 * c + 1])) < 1e-12 * scale);
      }

      std::vector<double> g1(n), g2(n), h1(n), h2(n), g3(n), g4(n), h3(n), h4(n);
      scalar_kernels().representation_row(target, kappa, v, g1.data(), g2.data(), h1.data(), h2.data());
      avx->representation_row(target, kappa, v, g3.data(), g4.data(), h3.data(), h4.data());
      CHECK(rel_diff(g1, g2, g3, g4) < 1e-13);
      CHECK(rel_diff(h1, h2, h3, h4) < 1e-13);
    }
  }
}

TEST_CASE("avx2 sincos is accurate over many periods") {
  const KernelTable* avx = avx2_kernels();
  if (!avx) return;
  // Unit weight, source at distance r along x: the single-layer value is
  // exp(-i kappa r) / (4 pi r), so sweeping kappa sweeps the phase.
  const double t[3] = {0.0, 0.0, 0.0};
  const double n[3] = {1.0, 0.0, 0.0};
  double worst = 0.0;
  for (int k = 0; k < 4000; ++k) {
    const double kappa = 0.013 * k;
    const double zx[4] = {1.0, 2.5, 7.0, 31.0}, zy[4] = {0, 0, 0, 0}, zz[4] = {0, 0, 0, 0}, w[4] = {1, 1, 1, 1};
    const Sources src{zx, zy, zz, n, n, n, w, 4};
    double re[4], im[4];
    avx->layer_combination(t, n, kappa, 0.0, 1.0, 0.0, src, re, im);
    for (int q = 0; q < 4; ++q) {
      const cplx exact = std::polar(1.0 / (4 * kPi * zx[q]), -kappa * zx[q]);
      worst = std::max(worst, std::abs(cplx(re[q], im[q]) - exact) * 4 * kPi * zx[q]);
    }
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("dispatch honours the scalar override") {
  CHECK((active_isa() == Isa::kAvx2) == (avx2_kernels() != nullptr && &kernels() == avx2_kernels()));
  CHECK(isa_name(Isa::kScalar) == "scalar");
}
