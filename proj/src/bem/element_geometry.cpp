#include "roughscat/bem/element_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace roughscat::bem {

namespace {

constexpr double kMinJacobian = 1e-14;
constexpr int kChunk = 256;

void check_jacobian(double j, int e) {
  if (!(j >= kMinJacobian)) throw NumericalError("degenerate element " + std::to_string(e) + " (zero area)");
}

}  // namespace

void PointCloud::resize(int n) {
  for (auto* v : {&x, &y, &z, &nx, &ny, &nz, &w}) v->assign(n, 0.0);
}

void PointCloud::set(int k, const Vec3& p, const Vec3& n, double weight) {
  x[k] = p.x();
  y[k] = p.y();
  z[k] = p.z();
  nx[k] = n.x();
  ny[k] = n.y();
  nz[k] = n.z();
  w[k] = weight;
}

simd::Sources PointCloud::sources() const { return sources(0, size()); }

simd::Sources PointCloud::sources(int begin, int count) const {
  return {x.data() + begin,  y.data() + begin,  z.data() + begin, nx.data() + begin,
          ny.data() + begin, nz.data() + begin, w.data() + begin, count};
}

PointCloud map_rule(const BoundaryDiscretization& disc, int e, const LocalRule& rule) {
  PointCloud c;
  c.resize(rule.size());
  const std::vector<LocalFrame> frames = disc.local_frames(e, rule.u, rule.v);
  for (int k = 0; k < rule.size(); ++k) {
    const LocalFrame& f = frames[k];
    check_jacobian(f.jacobian, e);
    c.set(k, f.point, f.normal, rule.w[k] * f.jacobian);
  }
  return c;
}

std::vector<PointCloud> map_rule_all(const BoundaryDiscretization& disc, const LocalRule& rule) {
  const auto& surf = disc.surface();
  const auto& grid = surf.grid();
  const int n1 = grid.size();
  const int nn = n1 * n1;
  const int m = surf.num_patches();
  const int np = rule.size();
  const Eigen::MatrixXd diff = geometry::differentiation_matrix(grid);

  // Row 3 P + c holds coordinate c of patch P's nodal values.
  Eigen::MatrixXd nodal(3 * m, nn);
  for (int p = 0; p < m; ++p) nodal.middleRows(3 * p, 3) = surf.nodal(p);

  std::vector<PointCloud> clouds(disc.num_elements());
  for (auto& c : clouds) c.resize(np);
  // Element index of patch P at position (ix, iy).
  auto element_index = [](int patch, int ix, int iy) {
    return (patch * kElementsPerDirection + iy) * kElementsPerDirection + ix;
  };

  Eigen::MatrixXd lval(nn, kChunk), lds(nn, kChunk), ldt(nn, kChunk);
  Eigen::VectorXd ls(n1), lt(n1), dls(n1), dlt(n1);
  for (int iy = 0; iy < kElementsPerDirection; ++iy) {
    for (int ix = 0; ix < kElementsPerDirection; ++ix) {
      for (int begin = 0; begin < np; begin += kChunk) {
        const int count = std::min(kChunk, np - begin);
        for (int k = 0; k < count; ++k) {
          const double s = ix * kElementWidth + kElementWidth * rule.u[begin + k];
          const double t = iy * kElementWidth + kElementWidth * rule.v[begin + k];
          geometry::bary_basis(grid, s, std::span<double>(ls.data(), n1));
          geometry::bary_basis(grid, t, std::span<double>(lt.data(), n1));
          dls.noalias() = diff.transpose() * ls;
          dlt.noalias() = diff.transpose() * lt;
          for (int kt = 0; kt < n1; ++kt) {
            for (int ks = 0; ks < n1; ++ks) {
              lval(ks + n1 * kt, k) = ls[ks] * lt[kt];
              lds(ks + n1 * kt, k) = dls[ks] * lt[kt];
              ldt(ks + n1 * kt, k) = ls[ks] * dlt[kt];
            }
          }
        }
        const Eigen::MatrixXd x = nodal * lval.leftCols(count);
        const Eigen::MatrixXd xs = nodal * lds.leftCols(count);
        const Eigen::MatrixXd xt = nodal * ldt.leftCols(count);
        for (int p = 0; p < m; ++p) {
          const int e = element_index(p, ix, iy);
          const double orient = surf.orientation(p);
          PointCloud& c = clouds[e];
          for (int k = 0; k < count; ++k) {
            const Vec3 tu = kElementWidth * xs.block<3, 1>(3 * p, k);
            const Vec3 tv = kElementWidth * xt.block<3, 1>(3 * p, k);
            const Vec3 cr = tu.cross(tv);
            const double jac = cr.norm();
            check_jacobian(jac, e);
            c.set(begin + k, x.block<3, 1>(3 * p, k), (orient / jac) * cr, rule.w[begin + k] * jac);
          }
        }
      }
    }
  }
  return clouds;
}

ClosestPoint closest_point(const BoundaryDiscretization& disc, int e, const Vec3& x, double u0, double v0) {
  double u = std::clamp(u0, 0.0, 1.0), v = std::clamp(v0, 0.0, 1.0);
  LocalFrame f = disc.local_frame(e, u, v);
  for (int it = 0; it < 30; ++it) {
    const Vec3 res = x - f.point;
    Eigen::Matrix2d g;
    g << f.du.dot(f.du), f.du.dot(f.dv), f.du.dot(f.dv), f.dv.dot(f.dv);
    Eigen::Vector2d rhs(f.du.dot(res), f.dv.dot(res));
    // Coordinates pinned at a bound with the gradient pointing outward are
    // held fixed so the iteration slides along edges.
    const bool fix_u = (u <= 0.0 && rhs.x() < 0.0) || (u >= 1.0 && rhs.x() > 0.0);
    const bool fix_v = (v <= 0.0 && rhs.y() < 0.0) || (v >= 1.0 && rhs.y() > 0.0);
    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    if (!fix_u && !fix_v) {
      step = g.ldlt().solve(rhs);
    } else if (!fix_u) {
      step.x() = rhs.x() / g(0, 0);
    } else if (!fix_v) {
      step.y() = rhs.y() / g(1, 1);
    }
    const double un = std::clamp(u + step.x(), 0.0, 1.0);
    const double vn = std::clamp(v + step.y(), 0.0, 1.0);
    const double moved = std::abs(un - u) + std::abs(vn - v);
    u = un;
    v = vn;
    f = disc.local_frame(e, u, v);
    if (moved < 1e-13) break;
  }
  return {u, v, f.point, (x - f.point).norm()};
}

}  // namespace roughscat::bem
