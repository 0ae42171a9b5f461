#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "roughscat/geometry/gauss.hpp"
#include "roughscat/geometry/landmarks.hpp"
#include "roughscat/geometry/multipatch.hpp"
#include "roughscat/geometry/quadrature.hpp"

using namespace roughscat;
using namespace roughscat::geometry;

namespace {

NurbsPatch flat_patch(double scale = 1.0) {
  NurbsPatch p;
  p.knots_u = {0, 0, 1, 1};
  p.knots_v = {0, 0, 1, 1};
  p.control = {Vec3(0, 0, 0), Vec3(scale, 0, 0), Vec3(0, scale, 0), Vec3(scale, scale, 0)};
  p.weights = {1, 1, 1, 1};
  return p;
}

MultiPatchSurface single_patch_surface(NurbsPatch p) {
  MultiPatchSurface s;
  s.patches.emplace_back(std::move(p));
  s.orientation = {1};
  return s;
}

InterpolatedSurface interpolate(const MultiPatchSurface& surface, int q) {
  const LandmarkSet lm = build_landmarks(surface, q);
  return surface_from_global(lm, lm.points);
}

// Number of clusters under "closer than tol", by exhaustive pairwise union.
int brute_force_clusters(const std::vector<Vec3>& pts, double tol) {
  std::vector<int> parent(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if ((pts[i] - pts[j]).norm() < tol) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
    }
  }
  std::set<int> roots;
  for (std::size_t i = 0; i < pts.size(); ++i) roots.insert(find(static_cast<int>(i)));
  return static_cast<int>(roots.size());
}

}  // namespace

TEST_CASE("chebyshev grid nodes and weights") {
  const ChebyshevGrid g2 = chebyshev_grid(2);
  CHECK(g2.nodes == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(g2.weights == std::vector<double>{0.5, -1.0, 0.5});

  const ChebyshevGrid g1 = chebyshev_grid(1);
  CHECK(g1.nodes == std::vector<double>{0.0, 1.0});
  CHECK(g1.weights == std::vector<double>{0.5, -0.5});

  CHECK_THROWS_AS(chebyshev_grid(0), InvalidArgument);

  const ChebyshevGrid g = chebyshev_grid(13);
  for (int k = 0; k <= 13; ++k) {
    CHECK(g.nodes[k] == doctest::Approx((1.0 - std::cos(k * kPi / 13)) / 2).epsilon(1e-15));
    if (k > 0) CHECK(g.nodes[k] > g.nodes[k - 1]);
  }
}

TEST_CASE("barycentric evaluation in one variable") {
  const ChebyshevGrid g2 = chebyshev_grid(2);
  const std::vector<double> sq{0.0, 0.25, 1.0};
  CHECK(bary_eval_1d(g2, sq, 0.25) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(bary_eval_1d(g2, sq, 0.5) == 0.25);

  const ChebyshevGrid g20 = chebyshev_grid(20);
  std::vector<double> ev;
  for (double x : g20.nodes) ev.push_back(std::exp(x));
  double err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double s = i / 999.0;
    err = std::max(err, std::abs(bary_eval_1d(g20, ev, s) - std::exp(s)));
  }
  CHECK(err <= 1e-12);

  CHECK_THROWS_AS(bary_eval_1d(g2, std::vector<double>{1.0, 2.0}, 0.3), InvalidArgument);
}

TEST_CASE("barycentric evaluation is invariant under affine maps of the nodes") {
  const ChebyshevGrid g = chebyshev_grid(7);
  ChebyshevGrid mapped = g;
  for (double& x : mapped.nodes) x = 3.0 + 2.5 * x;
  std::vector<double> f;
  for (double x : g.nodes) f.push_back(std::sin(4 * x));
  for (double s : {0.1, 0.37, 0.8}) {
    CHECK(bary_eval_1d(mapped, f, 3.0 + 2.5 * s) == doctest::Approx(bary_eval_1d(g, f, s)).epsilon(1e-13));
  }
}

TEST_CASE("differentiation matrix is exact on polynomials") {
  const ChebyshevGrid g = chebyshev_grid(6);
  const Eigen::MatrixXd d = differentiation_matrix(g);
  Eigen::VectorXd f(7), df(7);
  for (int k = 0; k < 7; ++k) {
    const double x = g.nodes[k];
    f[k] = std::pow(x, 5) - 2 * x * x;
    df[k] = 5 * std::pow(x, 4) - 4 * x;
  }
  CHECK((d * f - df).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("gauss-legendre rules") {
  for (int n : {1, 2, 5, 12}) {
    const GaussRule& g = gauss_legendre(n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += g.weights[i] * std::pow(g.nodes[i], deg);
      CHECK(sum == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-14));
    }
  }
}

TEST_CASE("patch evaluation") {
  const PatchMap flat(flat_patch());
  CHECK((patch_eval(flat, 0.3, 0.7) - Vec3(0.3, 0.7, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(patch_eval(flat, 1.2, 0.5), InvalidArgument);
  CHECK_THROWS_AS(patch_eval(flat, 0.5, -0.1), InvalidArgument);

  // Quarter circle x^2 + y^2 = 1 extruded along z.
  NurbsPatch arc;
  arc.degree_u = 2;
  arc.degree_v = 1;
  arc.knots_u = {0, 0, 0, 1, 1, 1};
  arc.knots_v = {0, 0, 1, 1};
  const double w = 1.0 / std::sqrt(2.0);
  for (double z : {0.0, 1.0}) {
    arc.control.insert(arc.control.end(), {Vec3(1, 0, z), Vec3(1, 1, z), Vec3(0, 1, z)});
    arc.weights.insert(arc.weights.end(), {1.0, w, 1.0});
  }
  const PatchMap arc_map(arc);
  double err = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 4; ++j) {
      const Vec3 x = patch_eval(arc_map, i / 20.0, j / 4.0);
      err = std::max(err, std::abs(x.x() * x.x() + x.y() * x.y() - 1.0));
    }
  }
  CHECK(err < 1e-12);

  const MultiPatchSurface torus = builtin_surface("torus");
  CHECK((patch_eval(torus.patches[0], 0.0, 0.0) - Vec3(1.0, 0.0, 0.0)).norm() < 1e-15);
}

TEST_CASE("invalid patches are rejected") {
  NurbsPatch p = flat_patch();
  p.weights[2] = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = flat_patch();
  p.knots_u = {0, 0.5, 0.4, 1};
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = flat_patch();
  p.control.pop_back();
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  NurbsPatch collapsed = flat_patch();
  collapsed.control = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 0), Vec3(1, 0, 0)};
  CHECK_THROWS_AS(PatchMap(collapsed).check_immersion(), InvalidArgument);
}

TEST_CASE("built-in surfaces") {
  const MultiPatchSurface torus = builtin_surface("torus");
  CHECK(torus.size() == 16);
  CHECK_NOTHROW(torus.validate());
  Vec3 lo = Vec3::Constant(1e9), hi = Vec3::Constant(-1e9);
  for (const auto& patch : torus.patches) {
    for (int i = 0; i <= 16; ++i) {
      for (int j = 0; j <= 16; ++j) {
        const Vec3 x = patch.eval(i / 16.0, j / 16.0);
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
      }
    }
  }
  CHECK((lo - Vec3(-1, -1, -0.25)).norm() < 1e-12);
  CHECK((hi - Vec3(1, 1, 0.25)).norm() < 1e-12);
  // Every edge of a closed surface is shared exactly once.
  CHECK(torus.adjacency.size() == 32);

  const MultiPatchSurface cuboid = builtin_surface("cuboid");
  CHECK(cuboid.size() == 24);
  CHECK(cuboid.adjacency.size() == 48);
  for (const auto& patch : cuboid.patches) {
    const Vec3 x = patch.eval(0.3, 0.6);
    CHECK(x.cwiseAbs().maxCoeff() == doctest::Approx(2.0));
  }

  const MultiPatchSurface sphere = builtin_surface("sphere");
  CHECK(sphere.size() == 6);
  CHECK(sphere.adjacency.size() == 12);
  CHECK_NOTHROW(sphere.validate());

  CHECK_THROWS_AS(builtin_surface("torus", {0.25, 0.75}), InvalidArgument);
  CHECK_THROWS_AS(builtin_surface("sphere", {-1.0}), InvalidArgument);
  CHECK_THROWS_AS(builtin_surface("teapot"), InvalidArgument);
}

TEST_CASE("declared edges that do not match are rejected") {
  MultiPatchSurface s = builtin_surface("cuboid");
  std::swap(s.adjacency[0].other_edge, s.adjacency[1].other_edge);
  s.adjacency[0].other_edge = (s.adjacency[0].other_edge + 1) % 4;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("landmark counts") {
  const LandmarkSet torus = build_landmarks(builtin_surface("torus"), 20);
  CHECK(torus.nodes_per_patch() == 441);
  CHECK(torus.num_patches() * torus.nodes_per_patch() == 7056);
  // 16 * 20^2 distinct points remain once shared edges are merged.
  CHECK(torus.count() == 6400);

  const LandmarkSet cube = build_landmarks(builtin_surface("cuboid"), 1);
  std::vector<Vec3> all;
  for (const auto& p : cube.local_points) all.insert(all.end(), p.begin(), p.end());
  CHECK(cube.count() == brute_force_clusters(all, kLandmarkMergeTolerance));
  CHECK(cube.count() == 26);

  const LandmarkSet flat = build_landmarks(single_patch_surface(flat_patch()), 2);
  CHECK(flat.count() == 9);
}

TEST_CASE("landmark ids: shared iff coincident, every id referenced") {
  const LandmarkSet lm = build_landmarks(builtin_surface("sphere"), 5);
  std::vector<int> refs(lm.count(), 0);
  for (int p = 0; p < lm.num_patches(); ++p) {
    for (int k = 0; k < lm.nodes_per_patch(); ++k) {
      const int id = lm.global_id[p][k];
      ++refs[id];
      CHECK((lm.points[id] - lm.local_points[p][k]).norm() < kLandmarkMergeTolerance);
    }
  }
  for (int r : refs) CHECK(r >= 1);
  for (int a = 0; a < lm.count(); ++a) {
    for (int b = a + 1; b < lm.count(); ++b) CHECK((lm.points[a] - lm.points[b]).norm() >= kLandmarkMergeTolerance);
  }
  std::vector<Vec3> all;
  for (const auto& p : lm.local_points) all.insert(all.end(), p.begin(), p.end());
  CHECK(lm.count() == brute_force_clusters(all, kLandmarkMergeTolerance));
}

TEST_CASE("landmark dedup is idempotent") {
  const LandmarkSet lm = build_landmarks(builtin_surface("torus"), 6);
  const InterpolatedSurface surf = surface_from_global(lm, lm.points);
  std::vector<std::vector<Vec3>> again(surf.num_patches());
  for (int p = 0; p < surf.num_patches(); ++p) {
    for (int k = 0; k < surf.nodal(p).cols(); ++k) again[p].push_back(surf.nodal(p).col(k));
  }
  std::vector<Vec3> reps;
  CHECK(deduplicate_points(again, kLandmarkMergeTolerance, reps) == lm.global_id);
}

TEST_CASE("interpolated surface reproduces nodes and polynomials") {
  const ChebyshevGrid g = chebyshev_grid(8);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  auto coeff = [&] {
    Eigen::MatrixXd c(9, 9);
    for (int i = 0; i < 81; ++i) c.data()[i] = u(rng);
    return c;
  };
  const Eigen::MatrixXd cx = coeff(), cy = coeff(), cz = coeff();
  auto poly = [](const Eigen::MatrixXd& c, double s, double t) {
    double v = 0.0;
    for (int a = 0; a < 9; ++a) {
      for (int b = 0; b < 9; ++b) v += c(a, b) * std::pow(s, a) * std::pow(t, b);
    }
    return v;
  };
  auto f = [&](double s, double t) { return Vec3(poly(cx, s, t), poly(cy, s, t), poly(cz, s, t)); };
  std::vector<Vec3> nodal;
  for (int kt = 0; kt <= 8; ++kt) {
    for (int ks = 0; ks <= 8; ++ks) nodal.push_back(f(g.nodes[ks], g.nodes[kt]));
  }
  const InterpolatedSurface surf(g, {nodal}, {1});
  for (int kt = 0; kt <= 8; ++kt) {
    for (int ks = 0; ks <= 8; ++ks) CHECK(surf.eval(0, g.nodes[ks], g.nodes[kt]) == nodal[ks + 9 * kt]);
  }
  double err = 0.0;
  for (int i = 0; i < 25; ++i) {
    const double s = u(rng) * 0.5 + 0.5, t = u(rng) * 0.5 + 0.5;
    err = std::max(err, (surf.eval(0, s, t) - f(s, t)).cwiseAbs().maxCoeff());
  }
  CHECK(err < 1e-12);

  // Re-interpolating its own samples reproduces the surface.
  std::vector<Vec3> resampled;
  for (int kt = 0; kt <= 8; ++kt) {
    for (int ks = 0; ks <= 8; ++ks) resampled.push_back(surf.eval(0, g.nodes[ks], g.nodes[kt]));
  }
  const InterpolatedSurface again(g, {resampled}, {1});
  CHECK((again.eval(0, 0.123, 0.877) - surf.eval(0, 0.123, 0.877)).norm() < 1e-12);
}

TEST_CASE("flat patch interpolation") {
  const MultiPatchSurface s = single_patch_surface(flat_patch(3.0));
  const InterpolatedSurface surf = interpolate(s, 3);
  for (double a : {0.0, 0.21, 0.5, 0.93}) {
    for (double b : {0.05, 0.6, 1.0}) {
      CHECK((surf.eval(0, a, b) - Vec3(3 * a, 3 * b, 0)).norm() < 1e-12);
      const SurfaceFrame f = surface_jacobian_normal(surf, 0, a, b);
      CHECK((f.normal - Vec3(0, 0, 1)).norm() < 1e-14);
      CHECK(f.area == doctest::Approx(9.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("mismatching shared landmarks are rejected") {
  const LandmarkSet lm = build_landmarks(builtin_surface("cuboid"), 2);
  std::vector<std::vector<Vec3>> nodal = lm.local_points;
  CHECK_NOTHROW(surface_from_nodal(lm, nodal));
  nodal[0][0] += Vec3(1e-6, 0, 0);
  CHECK_THROWS_AS(surface_from_nodal(lm, nodal), InvalidArgument);
  nodal = lm.local_points;
  nodal[3].pop_back();
  CHECK_THROWS_AS(surface_from_nodal(lm, nodal), InvalidArgument);
}

TEST_CASE("sphere re-interpolation converges geometrically") {
  const MultiPatchSurface sphere = builtin_surface("sphere");
  std::vector<double> errs;
  for (int q = 4; q <= 10; ++q) {
    const InterpolatedSurface surf = interpolate(sphere, q);
    double err = 0.0;
    for (int p = 0; p < 6; ++p) {
      for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
          const double s = i / 49.0, t = j / 49.0;
          err = std::max(err, (surf.eval(p, s, t) - sphere.patches[p].eval(s, t)).norm());
        }
      }
    }
    errs.push_back(err);
  }
  MESSAGE("sphere interpolation error q=4..10: " << errs.front() << " ... " << errs.back());
  for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < errs[i - 1]);
  // Geometric: the q=4 -> q=10 reduction exceeds 10^3.
  CHECK(errs.back() < 1e-3 * errs.front());
}

TEST_CASE("sphere normals") {
  const InterpolatedSurface surf = interpolate(builtin_surface("sphere"), 10);
  double err = 0.0;
  for (int p = 0; p < 6; ++p) {
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const SurfaceFrame f = surf.frame(p, i / 20.0, j / 20.0);
        err = std::max(err, (f.normal - f.point.normalized()).norm());
      }
    }
  }
  MESSAGE("sphere normal error at q=10: " << err);
  CHECK(err <= 1e-8);
}

TEST_CASE("tangents of a bilinear patch match finite differences") {
  NurbsPatch p = flat_patch();
  p.control = {Vec3(0, 0, 0), Vec3(2, 0.3, 0.1), Vec3(-0.2, 1, 0.5), Vec3(1.7, 1.4, -0.3)};
  const MultiPatchSurface s = single_patch_surface(p);
  const InterpolatedSurface surf = interpolate(s, 2);
  const double h = 1e-6;
  for (double a : {0.2, 0.5, 0.77}) {
    for (double b : {0.1, 0.45, 0.9}) {
      const SurfaceFrame f = surf.frame(0, a, b);
      const Vec3 fs = (s.patches[0].eval(a + h, b) - s.patches[0].eval(a - h, b)) / (2 * h);
      const Vec3 ft = (s.patches[0].eval(a, b + h) - s.patches[0].eval(a, b - h)) / (2 * h);
      CHECK((f.ds - fs).norm() <= 1e-5 * fs.norm());
      CHECK((f.dt - ft).norm() <= 1e-5 * ft.norm());
    }
  }
}

TEST_CASE("outward normals on convex built-ins") {
  for (const char* name : {"sphere", "cuboid"}) {
    const InterpolatedSurface surf = interpolate(builtin_surface(name), 6);
    for (int p = 0; p < surf.num_patches(); ++p) {
      for (const auto& qp : patch_quadrature(surf, p, 5)) CHECK(qp.normal.dot(qp.point) > 0.0);
    }
  }
  // Torus: outward relative to the tube centre line.
  const InterpolatedSurface torus = interpolate(builtin_surface("torus"), 8);
  for (int p = 0; p < 16; ++p) {
    for (const auto& qp : patch_quadrature(torus, p, 4)) {
      const Vec3 c = 0.75 * Vec3(qp.point.x(), qp.point.y(), 0).normalized();
      CHECK(qp.normal.dot(qp.point - c) > 0.0);
    }
  }
}

TEST_CASE("surface quadrature") {
  const InterpolatedSurface flat = interpolate(single_patch_surface(flat_patch()), 1);
  double one = 0.0;
  for (const auto& qp : patch_quadrature(flat, 0, 3)) one += qp.weight;
  CHECK(one == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(patch_quadrature(flat, 0, 0), InvalidArgument);

  const double sphere = surface_area(interpolate(builtin_surface("sphere"), 20), 12);
  MESSAGE("sphere area error (q=20, order 12): " << sphere - 4 * kPi);
  CHECK(std::abs(sphere - 4 * kPi) < 1e-8);

  const double torus = surface_area(interpolate(builtin_surface("torus"), 20), 12);
  MESSAGE("torus area error (q=20, order 12): " << torus - 4 * kPi * kPi * 0.1875);
  CHECK(std::abs(torus - 4 * kPi * kPi * 0.1875) < 1e-8);
}

TEST_CASE("quadrature of order p+2 is exact for degree 2(p+2)-1 on flat patches") {
  const InterpolatedSurface flat = interpolate(single_patch_surface(flat_patch()), 1);
  for (int p = 0; p <= 4; ++p) {
    const int deg = 2 * (p + 2) - 1;
    double sum = 0.0;
    for (const auto& qp : patch_quadrature(flat, 0, p + 2)) sum += qp.weight * std::pow(qp.s, deg) * std::pow(qp.t, deg);
    CHECK(sum == doctest::Approx(1.0 / ((deg + 1.0) * (deg + 1.0))).epsilon(1e-12));
  }
}

TEST_CASE("multipatch file round trip") {
  const MultiPatchSurface torus = builtin_surface("torus");
  const MultiPatchSurface back = parse_multipatch(format_multipatch(torus));
  CHECK(back.size() == 16);
  CHECK(back.orientation == torus.orientation);
  CHECK(back.adjacency == torus.adjacency);
  for (int p = 0; p < 16; ++p) CHECK((back.patches[p].eval(0.3, 0.8) - torus.patches[p].eval(0.3, 0.8)).norm() < 1e-14);

  const std::string text =
      "# unit square\n"
      "patches 1\n"
      "degrees 1 1\n"
      "knots_u 0 0 1 1\n"
      "knots_v 0 0 1 1\n"
      "0 0 0 1\n1 0 0 1\n0 1 0 1\n1 1 0 1\n";
  const MultiPatchSurface sq = parse_multipatch(text);
  CHECK(sq.size() == 1);
  CHECK(sq.adjacency.empty());
  CHECK((sq.patches[0].eval(0.5, 0.25) - Vec3(0.5, 0.25, 0)).norm() < 1e-15);

  CHECK_THROWS_AS(parse_multipatch("patches 1\ndegrees 1 1\nknots_u 0 0 1 1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_multipatch("patches 1\ndegrees 1 1\nknots_u 0 0 1 1\nknots_v 0 0 1 1\n0 0 0 1\n1 0 0 1\n0 1 0 1\n1 1 0 -1\n"),
                  InvalidArgument);
  CHECK_THROWS_AS(read_multipatch("/nonexistent/file.mp"), Error);
}
