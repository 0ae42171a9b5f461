#pragma once

#include <vector>

#include <Eigen/Core>

namespace roughscat::bem {

/// Quadrature rule on the local element square [0,1]^2.
struct LocalRule {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> w;

  [[nodiscard]] int size() const { return static_cast<int>(w.size()); }
  void push(double uu, double vv, double ww) {
    u.push_back(uu);
    v.push_back(vv);
    w.push_back(ww);
  }
};

/// n x n Gauss-Legendre rule on [0,1]^2.
LocalRule tensor_gauss(int n);

/// n x n Gauss-Legendre rule on the cell [ci, ci+1] x [cj, cj+1] / 2^depth.
LocalRule tensor_gauss_cell(int n, int depth, int ci, int cj);

/// Polar rule for integrands singular or nearly singular at the apex (au, av).
///
/// The square is split into eight triangles by the apex and its foot points on
/// the four edges (the foot points minimise the distance in `metric`, the
/// local first fundamental form at the apex).  Each triangle uses Gauss points
/// in (radius, edge coordinate); the Jacobian carries a factor of the radius,
/// cancelling 1/r.  The edge coordinate is sinh-graded when the apex is close
/// to an edge.  `distance` > 0 declares a target off the apex at that
/// physical distance and grades the radius as well.  Apices on an edge are
/// allowed; degenerate triangles are skipped.
LocalRule polar_rule(double au, double av, const Eigen::Matrix2d& metric, double distance, int n_radial,
                     int n_angular);

}  // namespace roughscat::bem
