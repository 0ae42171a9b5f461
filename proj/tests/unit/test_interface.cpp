#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <string>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "roughscat/bem/assembly.hpp"
#include "roughscat/bem/potential.hpp"
#include "roughscat/bem/wave.hpp"
#include "roughscat/geometry/landmarks.hpp"
#include "roughscat/interface/interface.hpp"
#include "roughscat/interface/moments.hpp"
#include "support/mie.hpp"

using namespace roughscat;
using namespace roughscat::interface;

namespace {

const std::shared_ptr<const geometry::InterpolatedSurface>& unit_sphere() {
  static const auto s = [] {
    const auto lm = geometry::build_landmarks(geometry::make_sphere(1.0), 12);
    return std::make_shared<const geometry::InterpolatedSurface>(geometry::surface_from_global(lm, lm.points));
  }();
  return s;
}

struct Solved {
  std::unique_ptr<bem::BoundaryDiscretization> disc;
  bem::NeumannTrace trace;
};

const Solved& sphere_solution(int p) {
  static std::map<int, Solved> cache;
  auto it = cache.find(p);
  if (it == cache.end()) {
    Solved s;
    s.disc = std::make_unique<bem::BoundaryDiscretization>(unit_sphere(), p);
    const bem::WaveSetup wave = bem::make_wave(2.0, Vec3::UnitX());
    s.trace = bem::solve_density(bem::assemble_cfie(*s.disc, wave), bem::rhs_incident(*s.disc, wave));
    it = cache.emplace(p, std::move(s)).first;
  }
  return it->second;
}

// Cauchy data of the radiating point source Phi(., x0).
CauchyData point_source_data(const ArtificialInterface& iface, double kappa, const Vec3& x0) {
  CauchyData c{Eigen::VectorXcd(iface.size()), Eigen::VectorXcd(iface.size())};
  for (int k = 0; k < iface.size(); ++k) {
    const Vec3 z = iface.point(k);
    c.value[k] = bem::fundamental_solution(kappa, z, x0);
    c.normal_derivative[k] =
        (bem::fundamental_solution_gradient(kappa, z, x0).array() * iface.normal(k).cast<cplx>().array()).sum();
  }
  return c;
}

CauchyData scaled(const CauchyData& c, cplx a) { return {a * c.value, a * c.normal_derivative}; }

}  // namespace

TEST_CASE("interface grid: point count, area and outward normals") {
  const ArtificialInterface iface;
  CHECK(iface.num_patches() == 24);
  CHECK(iface.size() == 1944);
  double area = 0.0;
  for (int k = 0; k < iface.size(); ++k) {
    area += iface.weight(k);
    CHECK(iface.point(k).cwiseAbs().maxCoeff() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(iface.normal(k).dot(iface.point(k)) > 0.0);
    CHECK(iface.normal(k).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(area == doctest::Approx(96.0).epsilon(1e-13));
  CHECK(ArtificialInterface(2.0, 17).size() == 24 * 17 * 17);
  CHECK(iface.patch_of(81) == 1);
  CHECK(iface.i_of(10) == 1);
  CHECK(iface.j_of(10) == 1);
}

TEST_CASE("enclosure margin is enforced") {
  const ArtificialInterface iface;
  CHECK_NOTHROW(iface.check_enclosure(1.9));
  CHECK_THROWS_AS(iface.check_enclosure(1.95), EnclosureError);
  CHECK_THROWS_AS(iface.check_enclosure(2.5), EnclosureError);
  CHECK_THROWS_AS(ArtificialInterface(0.0), InvalidArgument);
  CHECK_THROWS_AS(ArtificialInterface(2.0, 0), InvalidArgument);

  const auto lm = geometry::build_landmarks(geometry::make_sphere(1.96), 6);
  const auto big = std::make_shared<const geometry::InterpolatedSurface>(geometry::surface_from_global(lm, lm.points));
  const bem::BoundaryDiscretization disc(big, 0);
  bem::NeumannTrace trace{Eigen::VectorXcd::Zero(disc.num_dofs())};
  CHECK_THROWS_AS((void)cauchy_from_trace(disc, trace, 2.0, iface), EnclosureError);
}

TEST_CASE("zero trace gives zero Cauchy data and zero field") {
  const ArtificialInterface iface;
  const bem::BoundaryDiscretization disc(unit_sphere(), 1);
  const bem::NeumannTrace zero{Eigen::VectorXcd::Zero(disc.num_dofs())};
  const CauchyData c = cauchy_from_trace(disc, zero, 2.0, iface);
  CHECK(c.value.cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.normal_derivative.cwiseAbs().maxCoeff() == 0.0);
  CHECK(represent_exterior(iface, c, 2.0, Vec3(5.0, 0.0, 0.0)) == cplx(0.0));
}

TEST_CASE("representation formula rejects points inside or on the interface") {
  const ArtificialInterface iface;
  const CauchyData c = point_source_data(iface, 2.0, Vec3::Zero());
  CHECK_THROWS_AS((void)represent_exterior(iface, c, 2.0, Vec3(1.0, 0.5, 0.0)), InvalidArgument);
  CHECK_THROWS_AS((void)represent_exterior(iface, c, 2.0, Vec3(2.0, 0.5, 0.0)), InvalidArgument);
  CHECK_NOTHROW((void)represent_exterior(iface, c, 2.0, Vec3(2.01, 0.5, 0.0)));
  const CauchyData wrong{Eigen::VectorXcd::Zero(3), Eigen::VectorXcd::Zero(3)};
  CHECK_THROWS_AS((void)represent_exterior(iface, wrong, 2.0, Vec3(5.0, 0.0, 0.0)), InvalidArgument);
}

TEST_CASE("point source is reproduced by the representation formula") {
  const ArtificialInterface iface;
  for (double kappa : {2.0, 5.0}) {
    const CauchyData c = point_source_data(iface, kappa, Vec3::Zero());
    double err = 0.0;
    for (const Vec3& x : fibonacci_sphere(100, 5.0)) {
      err = std::max(err, std::abs(represent_exterior(iface, c, kappa, x) -
                                   bem::fundamental_solution(kappa, x, Vec3::Zero())));
    }
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("Cauchy data of the sphere match the Mie series on the cuboid at p=4") {
  const ArtificialInterface iface;
  const Solved& s = sphere_solution(4);
  const CauchyData c = cauchy_from_trace(*s.disc, s.trace, 2.0, iface);
  const testing::MieSoftSphere mie(2.0, 1.0, Vec3::UnitX());
  double err_u = 0.0, err_du = 0.0;
  for (int k = 0; k < iface.size(); ++k) {
    const Vec3 z = iface.point(k);
    err_u = std::max(err_u, std::abs(c.value[k] - mie.scattered(z)));
    const cplx dn = (mie.scattered_gradient(z).array() * iface.normal(k).cast<cplx>().array()).sum();
    err_du = std::max(err_du, std::abs(c.normal_derivative[k] - dn));
  }
  CHECK(err_u <= 1e-3);
  CHECK(err_du <= 1e-3);
}

TEST_CASE("Cauchy data are linear in the trace and independent of the worker count") {
  const ArtificialInterface iface;
  const Solved& s = sphere_solution(2);
  const cplx a(0.3, -1.2);
  bem::NeumannTrace t2 = s.trace;
  t2.coefficients = a * s.trace.coefficients + Eigen::VectorXcd::Constant(s.disc->num_dofs(), cplx(0.1, 0.2));
  bem::NeumannTrace t3{Eigen::VectorXcd::Constant(s.disc->num_dofs(), cplx(0.1, 0.2))};
  const CauchyData c1 = cauchy_from_trace(*s.disc, s.trace, 2.0, iface);
  const CauchyData c2 = cauchy_from_trace(*s.disc, t2, 2.0, iface);
  const CauchyData c3 = cauchy_from_trace(*s.disc, t3, 2.0, iface);
  CHECK((c2.value - a * c1.value - c3.value).cwiseAbs().maxCoeff() <= 1e-13 * c2.value.cwiseAbs().maxCoeff());
  CHECK((c2.normal_derivative - a * c1.normal_derivative - c3.normal_derivative).cwiseAbs().maxCoeff() <=
        1e-13 * c2.normal_derivative.cwiseAbs().maxCoeff());
  const CauchyData c4 = cauchy_from_trace(*s.disc, s.trace, 2.0, iface, 3);
  CHECK(c4.value == c1.value);
  CHECK(c4.normal_derivative == c1.normal_derivative);
}

TEST_CASE("interface path and direct path agree within the oracle error") {
  const ArtificialInterface iface;
  const testing::MieSoftSphere mie(2.0, 1.0, Vec3::UnitX());
  const auto pts = fibonacci_sphere(100, 5.0);
  for (int p = 0; p <= 4; ++p) {
    const Solved& s = sphere_solution(p);
    const bem::PotentialEvaluator ev(*s.disc, s.trace.coefficients, 2.0);
    const CauchyData c = cauchy_from_trace(*s.disc, s.trace, 2.0, iface);
    double diff = 0.0, err_direct = 0.0, err_iface = 0.0;
    for (const Vec3& x : pts) {
      const cplx d = ev.value(x), r = represent_exterior(iface, c, 2.0, x), exact = mie.scattered(x);
      diff = std::max(diff, std::abs(d - r));
      err_direct = std::max(err_direct, std::abs(d - exact));
      err_iface = std::max(err_iface, std::abs(r - exact));
    }
    INFO("p = " << p << " direct " << err_direct << " interface " << err_iface << " diff " << diff);
    CHECK(diff <= 3.0 * std::min(err_direct, err_iface));
  }
}

TEST_CASE("refining the interface grid from 9 to 17 changes propagated values by at most 1e-6") {
  const Solved& s = sphere_solution(4);
  const ArtificialInterface coarse(2.0, 9), fine(2.0, 17);
  const CauchyData cc = cauchy_from_trace(*s.disc, s.trace, 2.0, coarse);
  const CauchyData cf = cauchy_from_trace(*s.disc, s.trace, 2.0, fine);
  // Single-sample correlations factor as u(x) conj(u(x')), which avoids the
  // dense second-moment matrix of the fine grid.
  const auto pts = fibonacci_sphere(100, 5.0);
  Eigen::VectorXcd uc(100), uf(100);
  for (int i = 0; i < 100; ++i) {
    uc[i] = represent_exterior(coarse, cc, 2.0, pts[i]);
    uf[i] = represent_exterior(fine, cf, 2.0, pts[i]);
  }
  CHECK((uc - uf).cwiseAbs().maxCoeff() <= 1e-6);
  const Eigen::MatrixXcd corc = uc * uc.adjoint(), corf = uf * uf.adjoint();
  CHECK((corc - corf).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("moments of a single sample: mean, rank-1 correlation and Hermitian symmetry") {
  const ArtificialInterface iface;
  const Solved& s = sphere_solution(2);
  const CauchyData c = cauchy_from_trace(*s.disc, s.trace, 2.0, iface);
  const InterfaceMoments m = InterfaceMoments::from_sample(c);
  const Vec3 x(5.0, 0.0, 0.0), xp(-1.0, 3.0, 4.0);
  const cplx ux = represent_exterior(iface, c, 2.0, x), uxp = represent_exterior(iface, c, 2.0, xp);
  CHECK(std::abs(propagate_mean(iface, m, 2.0, x) - ux) <= 1e-14);
  CHECK(std::abs(propagate_correlation(iface, m, 2.0, x, xp) - ux * std::conj(uxp)) <= 1e-12);
  const cplx diag = propagate_correlation(iface, m, 2.0, x, x);
  CHECK(std::abs(diag - std::norm(ux)) <= 1e-12);
  CHECK(std::abs(diag.imag()) <= 1e-12);
  CHECK(diag.real() >= 0.0);
  CHECK(std::abs(propagate_correlation(iface, m, 2.0, x, xp) - std::conj(propagate_correlation(iface, m, 2.0, xp, x))) <=
        1e-12);
  CHECK(centered_covariance(m).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((m.cor_u_du() - m.cor_du_u().adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("moments are linear: averaging two samples averages the propagated fields") {
  const ArtificialInterface iface(2.0, 4);
  const CauchyData a = point_source_data(iface, 2.0, Vec3(0.2, 0.0, 0.1));
  const CauchyData b = scaled(point_source_data(iface, 2.0, Vec3(-0.3, 0.4, 0.0)), cplx(0.0, 2.0));
  InterfaceMoments avg(iface.size());
  avg.mean = 0.5 * (a.stacked() + b.stacked());
  avg.second = 0.5 * (a.stacked() * a.stacked().adjoint() + b.stacked() * b.stacked().adjoint());
  const auto pts = fibonacci_sphere(20, 5.0);
  const PropagatedMoments pm = propagate(iface, avg, 2.0, pts, 2);
  for (int i = 0; i < 20; ++i) {
    const cplx ra = represent_exterior(iface, a, 2.0, pts[i]), rb = represent_exterior(iface, b, 2.0, pts[i]);
    CHECK(std::abs(pm.mean[i] - 0.5 * (ra + rb)) <= 1e-13);
    CHECK(std::abs(propagate_mean(iface, avg, 2.0, pts[i]) - pm.mean[i]) <= 1e-14);
    for (int j = 0; j < 20; ++j) {
      const cplx sa = represent_exterior(iface, a, 2.0, pts[j]), sb = represent_exterior(iface, b, 2.0, pts[j]);
      CHECK(std::abs(pm.correlation(i, j) - 0.5 * (ra * std::conj(sa) + rb * std::conj(sb))) <= 1e-12);
    }
  }
  const Eigen::MatrixXcd cuu = avg.cor_u_u(), cdd = avg.cor_du_du();
  CHECK((cuu - cuu.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((cdd - cdd.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cuu);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
  CHECK(std::abs(propagate_mean(iface, InterfaceMoments(iface.size()), 2.0, pts[0])) == 0.0);
  CHECK(std::abs(propagate_correlation(iface, InterfaceMoments(iface.size()), 2.0, pts[0], pts[1])) == 0.0);
  CHECK_THROWS_AS((void)propagate_mean(iface, InterfaceMoments(5), 2.0, pts[0]), InvalidArgument);
}

TEST_CASE("moment files round trip") {
  const ArtificialInterface iface(2.0, 3);
  const CauchyData c = point_source_data(iface, 2.0, Vec3(0.1, 0.2, 0.3));
  const InterfaceMoments m = InterfaceMoments::from_sample(c);
  const std::string path = "test_interface_moments.bin";
  save_moments(m, path);
  const InterfaceMoments r = load_moments(path);
  CHECK(r.points == m.points);
  CHECK(r.mean == m.mean);
  CHECK(r.second == m.second);
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)load_moments("does_not_exist.bin"), Error);

  const std::string csv = "test_interface_mean.csv";
  write_interface_csv(iface, m.mean_value(), csv);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "patch,i,j,x,y,z,re,im");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == iface.size());
  std::remove(csv.c_str());
}
