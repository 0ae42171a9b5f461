#include "roughscat/bem/local_rules.hpp"

#include <algorithm>
#include <cmath>

#include "roughscat/common.hpp"
#include "roughscat/geometry/gauss.hpp"

namespace roughscat::bem {

namespace {

constexpr double kDegenerate = 1e-13;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Maps Gauss nodes on [0,1] to [0, length], clustered at 0 with scale h when
// h is small compared to the length.
struct Graded {
  std::vector<double> x, dx;
};

Graded graded_nodes(const geometry::GaussRule& g, double length, double h) {
  Graded out;
  const std::size_t n = g.nodes.size();
  out.x.resize(n);
  out.dx.resize(n);
  if (h > 0.0 && h < length) {
    const double mu = std::asinh(length / h);
    for (std::size_t k = 0; k < n; ++k) {
      out.x[k] = h * std::sinh(mu * g.nodes[k]);
      out.dx[k] = h * mu * std::cosh(mu * g.nodes[k]) * g.weights[k];
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      out.x[k] = length * g.nodes[k];
      out.dx[k] = length * g.weights[k];
    }
  }
  return out;
}

}  // namespace

LocalRule tensor_gauss(int n) { return tensor_gauss_cell(n, 0, 0, 0); }

LocalRule tensor_gauss_cell(int n, int depth, int ci, int cj) {
  const auto& g = geometry::gauss_legendre(n);
  const double h = std::ldexp(1.0, -depth);
  LocalRule r;
  r.u.reserve(n * n);
  r.v.reserve(n * n);
  r.w.reserve(n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) r.push(h * (ci + g.nodes[i]), h * (cj + g.nodes[j]), h * h * g.weights[i] * g.weights[j]);
  }
  return r;
}

LocalRule polar_rule(double au, double av, const Eigen::Matrix2d& metric, double distance, int n_radial,
                     int n_angular) {
  if (n_radial < 1 || n_angular < 1) throw InvalidArgument("polar_rule: orders must be positive");
  if (!(au >= 0.0 && au <= 1.0 && av >= 0.0 && av <= 1.0)) throw InvalidArgument("polar_rule: apex outside element");
  const auto& gr = geometry::gauss_legendre(n_radial);
  const auto& ga = geometry::gauss_legendre(n_angular);
  const Eigen::Vector2d apex(au, av);
  const Eigen::Vector2d corners[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  LocalRule rule;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector2d e0 = corners[k];
    const Eigen::Vector2d e = corners[(k + 1) % 4] - e0;  // unit length
    const Eigen::Vector2d r0 = e0 - apex;
    const double height = std::abs(cross2(e, r0));
    if (height < kDegenerate) continue;
    const double ege = e.dot(metric * e);
    const double rge = r0.dot(metric * e);
    const double tau_foot = std::clamp(-rge / ege, 0.0, 1.0);
    // Metric distance from the apex to the edge line, in edge-parameter units.
    const double h_tau = std::sqrt(std::max(r0.dot(metric * r0) - rge * rge / ege, 0.0) / ege);
    const Eigen::Vector2d foot = e0 + tau_foot * e;
    for (int side = 0; side < 2; ++side) {
      const double length = side == 0 ? tau_foot : 1.0 - tau_foot;
      if (length < kDegenerate) continue;
      const Eigen::Vector2d dir = side == 0 ? Eigen::Vector2d(-e) : e;
      const Graded ang = graded_nodes(ga, length, h_tau);
      for (int j = 0; j < n_angular; ++j) {
        const Eigen::Vector2d ray = foot + ang.x[j] * dir - apex;
        const double ell = std::sqrt(ray.dot(metric * ray));
        const Graded rad = graded_nodes(gr, 1.0, distance > 0.0 ? distance / ell : 0.0);
        for (int i = 0; i < n_radial; ++i) {
          const Eigen::Vector2d p = apex + rad.x[i] * ray;
          rule.push(std::clamp(p.x(), 0.0, 1.0), std::clamp(p.y(), 0.0, 1.0),
                    ang.dx[j] * rad.dx[i] * rad.x[i] * height);
        }
      }
    }
  }
  return rule;
}

}  // namespace roughscat::bem
